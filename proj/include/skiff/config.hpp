#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace skiff {

// Domain indexing used by every table in the model:
//   0 = scheduler, 1 = transmitter, 2 + i = i-th partition,
// with partitions ordered by their declared numeric id.
constexpr int k_scheduler = 0;
constexpr int k_transmitter = 1;

inline int partition_domain(int part_index) { return 2 + part_index; }
inline bool is_partition_domain(int dom) { return dom >= 2; }
inline int partition_of_domain(int dom) { return dom - 2; }

enum class PortMode : uint8_t { sampling, queuing };
enum class PortDirection : uint8_t { source, destination };
enum class PortIdStrategy : uint8_t { static_from_config, runtime_counter };

struct PartitionConf {
  int id = 0;
  std::string name;
};

// Ports are declared implicitly by channel endpoints; names are global.
struct PortConf {
  std::string name;
  PortMode mode = PortMode::sampling;
  PortDirection direction = PortDirection::source;
  int owner = -1;    // partition index
  int channel = -1;  // channel index
  int capacity = 1;  // queue bound; sampling slots hold at most one message
  int static_id = 0; // 1-based, fixed by declaration order
};

struct ChannelConf {
  std::string name;
  PortMode mode = PortMode::sampling;
  int source = -1;        // port index
  std::vector<int> dests; // port indices; queuing channels have exactly one
  int capacity = 1;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SysConfig {
  std::vector<PartitionConf> partitions; // sorted by id
  std::vector<PortConf> ports;           // declaration order; static ids are 1..n
  std::vector<ChannelConf> channels;
  int message_alphabet_size = 2;
  int default_queuing_capacity = 1;
  PortIdStrategy portid_strategy = PortIdStrategy::static_from_config;

  int n_domains() const { return 2 + (int)partitions.size(); }
  int n_partitions() const { return (int)partitions.size(); }
  int n_ports() const { return (int)ports.size(); }
  int n_channels() const { return (int)channels.size(); }

  int find_partition(const std::string& nm) const {
    for (int i = 0; i < (int)partitions.size(); ++i)
      if (partitions[i].name == nm) return i;
    return -1;
  }

  int find_port(const std::string& nm) const {
    for (int i = 0; i < (int)ports.size(); ++i)
      if (ports[i].name == nm) return i;
    return -1;
  }

  std::string domain_name(int dom) const {
    if (dom == k_scheduler) return "Scheduler";
    if (dom == k_transmitter) return "Transmitter";
    int p = partition_of_domain(dom);
    if (p >= 0 && p < (int)partitions.size()) return partitions[p].name;
    return "?";
  }

  // Accepts a partition name, "Transmitter" or "Scheduler"; -1 if unknown.
  int parse_domain(const std::string& nm) const {
    if (nm == "Scheduler") return k_scheduler;
    if (nm == "Transmitter") return k_transmitter;
    int p = find_partition(nm);
    return p < 0 ? -1 : partition_domain(p);
  }
};

// Interference relation over domain indices. Row-major adjacency matrix.
struct Policy {
  int n = 0;
  std::vector<uint8_t> mat;

  bool allows(int a, int b) const { return mat[(size_t)a * n + b] != 0; }

  std::vector<std::pair<int, int>> pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (allows(a, b)) out.emplace_back(a, b);
    return out;
  }
};

// The policy is exactly: reflexive pairs, scheduler rows, and per channel
// (source owner -> transmitter) and (transmitter -> destination owner).
// Deliberately intransitive: no direct pair between communicating partitions.
inline Policy derive_policy(const SysConfig& cfg) {
  Policy p;
  p.n = cfg.n_domains();
  p.mat.assign((size_t)p.n * p.n, 0);
  auto add = [&](int a, int b) { p.mat[(size_t)a * p.n + b] = 1; };
  for (int d = 0; d < p.n; ++d) {
    add(d, d);
    add(k_scheduler, d);
  }
  for (const ChannelConf& ch : cfg.channels) {
    add(partition_domain(cfg.ports[ch.source].owner), k_transmitter);
    for (int dst : ch.dests) add(k_transmitter, partition_domain(cfg.ports[dst].owner));
  }
  return p;
}

namespace detail {

inline bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum((unsigned char)c) || c == '_')) return false;
  return true;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] inline void cfg_fail(int line, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ": " << msg;
  throw ConfigError(os.str());
}

// "P1.qs" -> (partition index, port name); owner must exist already.
inline std::pair<int, std::string> parse_endpoint(const SysConfig& cfg, const std::string& tok,
                                                  int line) {
  auto dot = tok.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= tok.size())
    cfg_fail(line, "endpoint '" + tok + "' must be <partition>.<port>");
  std::string part = tok.substr(0, dot);
  std::string port = tok.substr(dot + 1);
  int pi = cfg.find_partition(part);
  if (pi < 0) cfg_fail(line, "unknown partition '" + part + "'");
  if (!valid_name(port)) cfg_fail(line, "invalid port name '" + port + "'");
  return {pi, port};
}

} // namespace detail

// Text format, one directive per line, '#' starts a comment:
//   partition <id> <name>
//   samplingchannel <name> source=<part>.<port> dest=<part>.<port>[,<part>.<port>...]
//   queuingchannel <name> source=<part>.<port> dest=<part>.<port> [capacity=<n>]
//   messages <k>
//   portids static|counter
inline SysConfig parse_config(const std::string& text) {
  using detail::cfg_fail;
  SysConfig cfg;
  bool saw_messages = false, saw_portids = false;

  std::vector<std::tuple<int, std::string, std::vector<std::string>>> chan_lines;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;

    const std::string& key = tok[0];
    if (key == "partition") {
      if (tok.size() != 3) cfg_fail(line, "partition takes <id> <name>");
      int id = 0;
      try {
        size_t pos = 0;
        id = std::stoi(tok[1], &pos);
        if (pos != tok[1].size()) throw std::invalid_argument("");
      } catch (...) {
        cfg_fail(line, "partition id '" + tok[1] + "' is not a number");
      }
      if (id < 0) cfg_fail(line, "partition id must be non-negative");
      if (!detail::valid_name(tok[2])) cfg_fail(line, "invalid partition name '" + tok[2] + "'");
      if (tok[2] == "Scheduler" || tok[2] == "Transmitter")
        cfg_fail(line, "partition name '" + tok[2] + "' is reserved");
      for (const auto& p : cfg.partitions) {
        if (p.id == id) cfg_fail(line, "duplicate partition id " + tok[1]);
        if (p.name == tok[2]) cfg_fail(line, "duplicate partition name '" + tok[2] + "'");
      }
      cfg.partitions.push_back({id, tok[2]});
    } else if (key == "samplingchannel" || key == "queuingchannel") {
      if (tok.size() < 2) cfg_fail(line, key + " needs a name");
      chan_lines.emplace_back(line, key, std::vector<std::string>(tok.begin() + 1, tok.end()));
    } else if (key == "messages") {
      if (saw_messages) cfg_fail(line, "duplicate messages directive");
      saw_messages = true;
      if (tok.size() != 2) cfg_fail(line, "messages takes <k>");
      int k = 0;
      try {
        k = std::stoi(tok[1]);
      } catch (...) {
        cfg_fail(line, "messages count '" + tok[1] + "' is not a number");
      }
      if (k < 1) cfg_fail(line, "message alphabet must have at least one token");
      cfg.message_alphabet_size = k;
    } else if (key == "portids") {
      if (saw_portids) cfg_fail(line, "duplicate portids directive");
      saw_portids = true;
      if (tok.size() != 2) cfg_fail(line, "portids takes static|counter");
      if (tok[1] == "static")
        cfg.portid_strategy = PortIdStrategy::static_from_config;
      else if (tok[1] == "counter")
        cfg.portid_strategy = PortIdStrategy::runtime_counter;
      else
        cfg_fail(line, "portids must be static or counter, got '" + tok[1] + "'");
    } else {
      cfg_fail(line, "unknown key '" + key + "'");
    }
  }

  if (cfg.partitions.empty()) throw ConfigError("no partitions declared");
  std::sort(cfg.partitions.begin(), cfg.partitions.end(),
            [](const PartitionConf& a, const PartitionConf& b) { return a.id < b.id; });

  // Channels resolve after all partitions are known; port declaration order
  // (channel order, source before destinations) fixes the static ids.
  for (auto& [cl, ckey, args] : chan_lines) {
    ChannelConf ch;
    ch.mode = (ckey == "queuingchannel") ? PortMode::queuing : PortMode::sampling;
    ch.capacity = cfg.default_queuing_capacity;
    if (!detail::valid_name(args[0])) cfg_fail(cl, "invalid channel name '" + args[0] + "'");
    ch.name = args[0];
    for (const auto& c : cfg.channels)
      if (c.name == ch.name) cfg_fail(cl, "duplicate channel name '" + ch.name + "'");

    std::string src_arg, dst_arg;
    bool saw_cap = false;
    for (size_t i = 1; i < args.size(); ++i) {
      auto eq = args[i].find('=');
      if (eq == std::string::npos) cfg_fail(cl, "expected key=value, got '" + args[i] + "'");
      std::string k = args[i].substr(0, eq), v = args[i].substr(eq + 1);
      if (k == "source") {
        if (!src_arg.empty()) cfg_fail(cl, "duplicate source");
        src_arg = v;
      } else if (k == "dest") {
        if (!dst_arg.empty()) cfg_fail(cl, "duplicate dest");
        dst_arg = v;
      } else if (k == "capacity") {
        if (ch.mode != PortMode::queuing) cfg_fail(cl, "capacity only applies to queuing channels");
        saw_cap = true;
        try {
          ch.capacity = std::stoi(v);
        } catch (...) {
          cfg_fail(cl, "capacity '" + v + "' is not a number");
        }
      } else {
        cfg_fail(cl, "unknown key '" + k + "'");
      }
    }
    (void)saw_cap;
    if (src_arg.empty()) cfg_fail(cl, "channel '" + ch.name + "' has no source");
    if (dst_arg.empty()) cfg_fail(cl, "channel '" + ch.name + "' has no dest");
    if (ch.capacity < 1) cfg_fail(cl, "capacity must be at least 1");

    auto add_port = [&](const std::string& nm, int owner, PortDirection dir) {
      if (cfg.find_port(nm) >= 0) cfg_fail(cl, "duplicate port name '" + nm + "'");
      PortConf pc;
      pc.name = nm;
      pc.mode = ch.mode;
      pc.direction = dir;
      pc.owner = owner;
      pc.channel = (int)cfg.channels.size();
      pc.capacity = (ch.mode == PortMode::queuing) ? ch.capacity : 1;
      pc.static_id = (int)cfg.ports.size() + 1;
      cfg.ports.push_back(pc);
      return (int)cfg.ports.size() - 1;
    };

    auto [spart, sport] = detail::parse_endpoint(cfg, src_arg, cl);
    ch.source = add_port(sport, spart, PortDirection::source);

    auto dst_toks = detail::split(dst_arg, ',');
    if (ch.mode == PortMode::queuing && dst_toks.size() != 1)
      cfg_fail(cl, "queuing channel '" + ch.name + "' must have exactly one destination");
    for (const auto& dt : dst_toks) {
      auto [dpart, dport] = detail::parse_endpoint(cfg, dt, cl);
      if (dpart == spart)
        cfg_fail(cl, "channel '" + ch.name + "': source and destination in the same partition");
      ch.dests.push_back(add_port(dport, dpart, PortDirection::destination));
    }
    cfg.channels.push_back(std::move(ch));
  }

  // static_id uniqueness holds by construction; keep the guard anyway.
  for (int i = 0; i < cfg.n_ports(); ++i)
    for (int j = i + 1; j < cfg.n_ports(); ++j)
      if (cfg.ports[i].static_id == cfg.ports[j].static_id)
        throw ConfigError("duplicate static id " + std::to_string(cfg.ports[i].static_id));

  return cfg;
}

// Canonical text form; parse_config(render_config(c)) reproduces c.
inline std::string render_config(const SysConfig& cfg) {
  std::ostringstream os;
  for (const auto& p : cfg.partitions) os << "partition " << p.id << " " << p.name << "\n";
  for (const auto& ch : cfg.channels) {
    const PortConf& src = cfg.ports[ch.source];
    os << (ch.mode == PortMode::queuing ? "queuingchannel " : "samplingchannel ") << ch.name
       << " source=" << cfg.partitions[src.owner].name << "." << src.name << " dest=";
    for (size_t i = 0; i < ch.dests.size(); ++i) {
      const PortConf& d = cfg.ports[ch.dests[i]];
      os << (i ? "," : "") << cfg.partitions[d.owner].name << "." << d.name;
    }
    if (ch.mode == PortMode::queuing) os << " capacity=" << ch.capacity;
    os << "\n";
  }
  os << "messages " << cfg.message_alphabet_size << "\n";
  os << "portids "
     << (cfg.portid_strategy == PortIdStrategy::static_from_config ? "static" : "counter") << "\n";
  return os.str();
}

} // namespace skiff
