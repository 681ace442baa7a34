#pragma once

#include <string>
#include <vector>

#include "skiff/state.hpp"

namespace skiff {

// What the transmitter is allowed to observe. source_only restricts it to the
// buffers it reads from (plus the created-port set); full adds destination
// buffers as well, which makes receive/clear by the destination owner visible
// to it and is exactly the reading the probe in the test suite demonstrates
// to be too strong.
enum class TransmitterView : uint8_t { source_only, full };

inline const char* transmitter_view_name(TransmitterView v) {
  return v == TransmitterView::source_only ? "source-only" : "full";
}

namespace detail {

inline bool tx_sees(TransmitterView tx, const PortConf& pc) {
  return tx == TransmitterView::full || pc.direction == PortDirection::source;
}

// Buffer observation is keyed by configured port, never by runtime id, so a
// domain cannot read id numbers out of a buffer view. 0xff marks "not
// created"; it cannot collide with a length because capacities are tiny.
inline void put_port_obs(const State& s, int cfg_idx, std::string& out) {
  int id = s.comm.id_of_port[cfg_idx];
  if (id == 0) {
    out.push_back((char)0xff);
    return;
  }
  const auto& buf = s.comm.ports[id - 1].buf;
  out.push_back((char)buf.size());
  for (int8_t b : buf) out.push_back((char)b);
}

inline void put_value(const Value& v, std::string& out) {
  out.push_back((char)v.kind);
  out.push_back((char)(v.v & 0xff));
  out.push_back((char)((v.v >> 8) & 0xff));
}

} // namespace detail

// Canonical observation of a state by one domain, appended to out.
//   scheduler:   its locals and who is running.
//   transmitter: its locals, the created-port set, and the buffers tx_sees.
//   partition:   its locals, its mode, created flags of its own ports, and
//                the contents of its own destination ports. Its source-port
//                buffers are deliberately absent: a transfer drains them and
//                the sender must not see that happen.
inline void view_bytes(const SysConfig& cfg, TransmitterView tx, int domain, const State& s,
                       std::string& out) {
  detail::put_value(s.locals[domain].ret, out);
  if (domain == k_scheduler) {
    out.push_back((char)s.current);
    return;
  }
  if (domain == k_transmitter) {
    for (int p = 0; p < cfg.n_ports(); ++p) out.push_back((char)(s.comm.created(p) ? 1 : 0));
    for (int p = 0; p < cfg.n_ports(); ++p)
      if (detail::tx_sees(tx, cfg.ports[p])) detail::put_port_obs(s, p, out);
    return;
  }
  int part = partition_of_domain(domain);
  out.push_back((char)s.part_mode[part]);
  for (int p = 0; p < cfg.n_ports(); ++p)
    if (cfg.ports[p].owner == part) out.push_back((char)(s.comm.created(p) ? 1 : 0));
  for (int p = 0; p < cfg.n_ports(); ++p)
    if (cfg.ports[p].owner == part && cfg.ports[p].direction == PortDirection::destination)
      detail::put_port_obs(s, p, out);
}

inline std::string view_bytes(const SysConfig& cfg, TransmitterView tx, int domain,
                              const State& s) {
  std::string out;
  view_bytes(cfg, tx, domain, s, out);
  return out;
}

// s and t are indistinguishable for domain d.
inline bool vpeq(const SysConfig& cfg, TransmitterView tx, int d, const State& s,
                 const State& t) {
  return view_bytes(cfg, tx, d, s) == view_bytes(cfg, tx, d, t);
}

using DomainSet = uint32_t;

inline bool vpeq_set(const SysConfig& cfg, TransmitterView tx, DomainSet ds, const State& s,
                     const State& t) {
  for (int d = 0; ds >> d; ++d)
    if ((ds >> d) & 1u)
      if (!vpeq(cfg, tx, d, s, t)) return false;
  return true;
}

// Named components of a view, aligned across states of the same config, for
// counterexample rendering.
struct ViewComponent {
  std::string name;
  std::string value;
};

inline std::vector<ViewComponent> view_components(const SysConfig& cfg, TransmitterView tx,
                                                  int domain, const State& s) {
  std::vector<ViewComponent> out;
  out.push_back({"last_result", render_value(cfg, s.locals[domain].ret)});
  auto port_obs = [&](int p) -> std::string {
    int id = s.comm.id_of_port[p];
    if (id == 0) return "(not created)";
    const auto& buf = s.comm.ports[id - 1].buf;
    std::string r = "[";
    for (size_t i = 0; i < buf.size(); ++i) {
      if (i) r += " ";
      r += message_name(buf[i]);
    }
    return r + "]";
  };
  if (domain == k_scheduler) {
    out.push_back({"current", cfg.domain_name(s.current)});
    return out;
  }
  if (domain == k_transmitter) {
    for (int p = 0; p < cfg.n_ports(); ++p)
      out.push_back({"created(" + cfg.ports[p].name + ")", s.comm.created(p) ? "yes" : "no"});
    for (int p = 0; p < cfg.n_ports(); ++p)
      if (detail::tx_sees(tx, cfg.ports[p]))
        out.push_back({"buffer(" + cfg.ports[p].name + ")", port_obs(p)});
    return out;
  }
  int part = partition_of_domain(domain);
  out.push_back({"mode", s.part_mode[part] == k_mode_normal ? "NORMAL" : "IDLE"});
  for (int p = 0; p < cfg.n_ports(); ++p)
    if (cfg.ports[p].owner == part)
      out.push_back({"created(" + cfg.ports[p].name + ")", s.comm.created(p) ? "yes" : "no"});
  for (int p = 0; p < cfg.n_ports(); ++p)
    if (cfg.ports[p].owner == part && cfg.ports[p].direction == PortDirection::destination)
      out.push_back({"buffer(" + cfg.ports[p].name + ")", port_obs(p)});
  return out;
}

// First component where d's views of s and t disagree; empty name when equal.
struct ViewDiff {
  std::string component;
  std::string left;
  std::string right;
  bool differs() const { return !component.empty(); }
};

inline ViewDiff view_diff(const SysConfig& cfg, TransmitterView tx, int domain, const State& s,
                          const State& t) {
  auto a = view_components(cfg, tx, domain, s);
  auto b = view_components(cfg, tx, domain, t);
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].value != b[i].value) return {a[i].name, a[i].value, b[i].value};
  return {};
}

inline std::string render_view(const SysConfig& cfg, TransmitterView tx, int domain,
                               const State& s) {
  auto cs = view_components(cfg, tx, domain, s);
  std::string out;
  for (size_t i = 0; i < cs.size(); ++i) {
    if (i) out += " ";
    out += cs[i].name + "=" + cs[i].value;
  }
  return out;
}

} // namespace skiff
