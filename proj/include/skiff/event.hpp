#pragma once

#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "skiff/config.hpp"

namespace skiff {

enum class EventKind : uint8_t {
  create_sampling_port,
  write_sampling_message,
  read_sampling_message,
  get_sampling_portid,
  get_sampling_portstatus,
  create_queuing_port,
  send_queuing_message,
  receive_queuing_message,
  get_queuing_portid,
  get_queuing_portstatus,
  clear_queuing_port,
  schedule,
  transfer_sampling,
  transfer_queuing,
  partition_action,
  init,
};

constexpr int k_event_kinds = 16;

// arg meaning by kind:
//   name-taking hypercalls (create_*, get_*_portid): port config index
//   id-taking hypercalls: runtime port id (1-based)
//   schedule: target domain index
//   transfer_*: channel index
//   partition_action: token = partition index
// msg carries the message token for write/send, else -1.
struct Event {
  EventKind kind = EventKind::init;
  int16_t arg = -1;
  int16_t msg = -1;

  bool operator==(const Event& o) const {
    return kind == o.kind && arg == o.arg && msg == o.msg;
  }
  bool operator!=(const Event& o) const { return !(*this == o); }
};

inline bool is_hypercall(EventKind k) {
  return k <= EventKind::clear_queuing_port;
}

// Name-taking hypercalls address ports by configured name; the rest of the
// hypercalls address them by runtime id.
inline bool takes_port_name(EventKind k) {
  switch (k) {
    case EventKind::create_sampling_port:
    case EventKind::create_queuing_port:
    case EventKind::get_sampling_portid:
    case EventKind::get_queuing_portid:
      return true;
    default:
      return false;
  }
}

inline bool takes_port_id(EventKind k) {
  return is_hypercall(k) && !takes_port_name(k);
}

inline bool takes_message(EventKind k) {
  return k == EventKind::write_sampling_message || k == EventKind::send_queuing_message;
}

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::create_sampling_port: return "Create_Sampling_Port";
    case EventKind::write_sampling_message: return "Write_Sampling_Message";
    case EventKind::read_sampling_message: return "Read_Sampling_Message";
    case EventKind::get_sampling_portid: return "Get_Sampling_Portid";
    case EventKind::get_sampling_portstatus: return "Get_Sampling_Portstatus";
    case EventKind::create_queuing_port: return "Create_Queuing_Port";
    case EventKind::send_queuing_message: return "Send_Queuing_Message";
    case EventKind::receive_queuing_message: return "Receive_Queuing_Message";
    case EventKind::get_queuing_portid: return "Get_Queuing_Portid";
    case EventKind::get_queuing_portstatus: return "Get_Queuing_Portstatus";
    case EventKind::clear_queuing_port: return "Clear_Queuing_Port";
    case EventKind::schedule: return "Schedule";
    case EventKind::transfer_sampling: return "Transfer_Sampling_Message";
    case EventKind::transfer_queuing: return "Transfer_Queuing_Message";
    case EventKind::partition_action: return "Partition_Action";
    case EventKind::init: return "Init";
  }
  return "?";
}

inline std::optional<EventKind> event_kind_from_name(const std::string& nm) {
  for (int i = 0; i < k_event_kinds; ++i) {
    EventKind k = (EventKind)i;
    if (nm == event_kind_name(k)) return k;
  }
  return std::nullopt;
}

inline std::string message_name(int tok) { return "m" + std::to_string(tok); }
inline std::string action_token_name(const SysConfig& cfg, int part_index) {
  return "a" + std::to_string(cfg.partitions[part_index].id);
}

// Under the static strategy a runtime id belongs to a fixed configured port,
// so ids render as the port name; under counter they render as #<id>.
inline std::string render_port_id(const SysConfig& cfg, int id) {
  if (cfg.portid_strategy == PortIdStrategy::static_from_config) {
    for (const PortConf& p : cfg.ports)
      if (p.static_id == id) return p.name;
  }
  return "#" + std::to_string(id);
}

inline std::string render_event(const SysConfig& cfg, const Event& e) {
  std::ostringstream os;
  os << event_kind_name(e.kind);
  switch (e.kind) {
    case EventKind::init:
      break;
    case EventKind::schedule:
      os << "(" << cfg.domain_name(e.arg) << ")";
      break;
    case EventKind::transfer_sampling:
    case EventKind::transfer_queuing:
      os << "(" << cfg.channels[e.arg].name << ")";
      break;
    case EventKind::partition_action:
      os << "(" << action_token_name(cfg, e.arg) << ")";
      break;
    default: {
      std::string port = takes_port_name(e.kind) ? cfg.ports[e.arg].name
                                                 : render_port_id(cfg, e.arg);
      os << "(" << port;
      if (takes_message(e.kind)) os << ", " << message_name(e.msg);
      os << ")";
      break;
    }
  }
  return os.str();
}

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

} // namespace detail

// Inverse of render_event. Accepts an optional "<domain>: " prefix (the trace
// serialization form) and, for id-taking calls, either a port name (resolved
// through static ids) or "#<id>".
inline Event parse_event(const SysConfig& cfg, const std::string& text_in) {
  std::string text = detail::trim(text_in);
  auto paren = text.find('(');
  std::string head = (paren == std::string::npos) ? text : text.substr(0, paren);
  auto colon = head.find(':');
  if (colon != std::string::npos) {
    text = detail::trim(text.substr(colon + 1));
    paren = text.find('(');
  }
  std::string name = detail::trim(paren == std::string::npos ? text : text.substr(0, paren));
  auto kind = event_kind_from_name(name);
  if (!kind) throw TraceError("unknown event '" + name + "'");

  std::vector<std::string> args;
  if (paren != std::string::npos) {
    if (text.back() != ')') throw TraceError("missing ')' in '" + text + "'");
    std::string inner = text.substr(paren + 1, text.size() - paren - 2);
    if (!detail::trim(inner).empty())
      for (const auto& a : detail::split(inner, ',')) args.push_back(detail::trim(a));
  }

  Event e;
  e.kind = *kind;
  auto want = [&](size_t n) {
    if (args.size() != n)
      throw TraceError(std::string(event_kind_name(e.kind)) + " takes " + std::to_string(n) +
                       " argument(s)");
  };
  switch (e.kind) {
    case EventKind::init:
      want(0);
      break;
    case EventKind::schedule: {
      want(1);
      int dom = cfg.parse_domain(args[0]);
      if (dom < 0 || dom == k_scheduler)
        throw TraceError("bad schedule target '" + args[0] + "'");
      e.arg = (int16_t)dom;
      break;
    }
    case EventKind::transfer_sampling:
    case EventKind::transfer_queuing: {
      want(1);
      int ch = -1;
      for (int i = 0; i < (int)cfg.channels.size(); ++i)
        if (cfg.channels[i].name == args[0]) ch = i;
      if (ch < 0) throw TraceError("unknown channel '" + args[0] + "'");
      PortMode need =
          e.kind == EventKind::transfer_sampling ? PortMode::sampling : PortMode::queuing;
      if (cfg.channels[ch].mode != need)
        throw TraceError("channel '" + args[0] + "' mode does not match transfer kind");
      e.arg = (int16_t)ch;
      break;
    }
    case EventKind::partition_action: {
      want(1);
      int tok = -1;
      for (int i = 0; i < cfg.n_partitions(); ++i)
        if (action_token_name(cfg, i) == args[0]) tok = i;
      if (tok < 0) throw TraceError("unknown action token '" + args[0] + "'");
      e.arg = (int16_t)tok;
      break;
    }
    default: {
      want(takes_message(e.kind) ? 2 : 1);
      if (takes_port_name(e.kind)) {
        int pi = cfg.find_port(args[0]);
        if (pi < 0) throw TraceError("unknown port '" + args[0] + "'");
        e.arg = (int16_t)pi;
      } else {
        int id = -1;
        if (!args[0].empty() && args[0][0] == '#') {
          try {
            id = std::stoi(args[0].substr(1));
          } catch (...) {
            throw TraceError("bad port id '" + args[0] + "'");
          }
        } else if (cfg.portid_strategy == PortIdStrategy::static_from_config) {
          int pi = cfg.find_port(args[0]);
          if (pi < 0) throw TraceError("unknown port '" + args[0] + "'");
          id = cfg.ports[pi].static_id;
        } else {
          throw TraceError("port argument '" + args[0] +
                           "' must be #<id> under the counter strategy");
        }
        if (id < 1) throw TraceError("port id must be positive");
        e.arg = (int16_t)id;
      }
      if (takes_message(e.kind)) {
        const std::string& m = args[1];
        if (m.size() < 2 || m[0] != 'm') throw TraceError("bad message token '" + m + "'");
        int tok = -1;
        try {
          tok = std::stoi(m.substr(1));
        } catch (...) {
          throw TraceError("bad message token '" + m + "'");
        }
        if (tok < 0 || tok >= cfg.message_alphabet_size)
          throw TraceError("message token '" + m + "' out of range");
        e.msg = (int16_t)tok;
      }
      break;
    }
  }
  return e;
}

// Semicolon-separated event list, e.g. a --prefix-a argument.
inline std::vector<Event> parse_trace(const SysConfig& cfg, const std::string& text) {
  std::vector<Event> out;
  for (const auto& part : detail::split(text, ';')) {
    std::string t = detail::trim(part);
    if (!t.empty()) out.push_back(parse_event(cfg, t));
  }
  return out;
}

inline std::string render_trace(const SysConfig& cfg, std::span<const Event> events) {
  std::string out;
  for (size_t i = 0; i < events.size(); ++i) {
    if (i) out += "; ";
    out += render_event(cfg, events[i]);
  }
  return out;
}

} // namespace skiff
