#pragma once

#include <span>

#include "skiff/event.hpp"
#include "skiff/state.hpp"

namespace skiff {

// arinc: status-reporting queuing send (NOT_AVAILABLE on a full queue) and
//        no-loss queuing transfer (whole transfer is a no-op when the
//        destination is full).
// fixed: silent may-lose send (always NO_ERROR; a full queue drops the
//        message) and may-lose transfer (head leaves the source even when
//        the destination is full and the message is destroyed).
enum class SemanticsVariant : uint8_t { arinc, fixed };

inline const char* variant_name(SemanticsVariant v) {
  return v == SemanticsVariant::arinc ? "arinc" : "fixed";
}

// Boot state. Under the static strategy every configured port exists with its
// config-assigned id and an empty buffer; under counter nothing is created
// and the id counter starts at 1. The first partition (by declared id) runs.
inline State init(const SysConfig& cfg) {
  State s;
  s.current = (int16_t)partition_domain(0);
  s.part_mode.assign(cfg.n_partitions(), k_mode_normal);
  s.locals.assign(cfg.n_domains(), LocalStore{});
  s.comm.cfg_port.assign(cfg.n_ports(), -1);
  s.comm.ports.assign(cfg.n_ports(), PortState{});
  s.comm.id_of_port.assign(cfg.n_ports(), 0);
  if (cfg.portid_strategy == PortIdStrategy::static_from_config) {
    s.next_port_id = 0;
    for (int i = 0; i < cfg.n_ports(); ++i) {
      int id = cfg.ports[i].static_id;
      s.comm.cfg_port[id - 1] = (int16_t)i;
      s.comm.id_of_port[i] = (int16_t)id;
    }
  } else {
    s.next_port_id = 1;
  }
  return s;
}

// Who an event belongs to. Hypercalls and partition actions belong to the
// domain that would run them (the current one); transfers to the transmitter;
// schedule and init to the scheduler. The state matters only through
// `current`, which the security engine relies on.
inline int domain_of_event_cur(int current, const Event& e) {
  switch (e.kind) {
    case EventKind::schedule:
    case EventKind::init:
      return k_scheduler;
    case EventKind::transfer_sampling:
    case EventKind::transfer_queuing:
      return k_transmitter;
    default:
      return current;
  }
}

inline int domain_of_event(const State& s, const Event& e) {
  return domain_of_event_cur(s.current, e);
}

inline bool event_enabled(const State& s, const Event& e) {
  switch (e.kind) {
    case EventKind::schedule:
      return true;
    case EventKind::init:
      return false;
    case EventKind::transfer_sampling:
    case EventKind::transfer_queuing:
      return s.current == k_transmitter;
    default:
      return is_partition_domain(s.current) &&
             s.part_mode[partition_of_domain(s.current)] == k_mode_normal;
  }
}

namespace detail {

// Runtime id -> configured port index; -1 when the id is out of range or not
// bound. Every hypercall is total: a bad id only yields INVALID_PARAM.
inline int port_of_id(const SysConfig& cfg, const State& s, int id) {
  if (id < 1 || id > cfg.n_ports()) return -1;
  return s.comm.cfg_port[id - 1];
}

inline void set_ret(State& s, Value v) { s.locals[s.current].ret = v; }

inline State fail(const SysConfig&, State s) {
  set_ret(s, Value::status(StatusCode::invalid_param));
  return s;
}

// Shared validity gate for id-taking calls: the id must resolve to a created
// port of the expected mode/direction owned by the calling partition.
inline bool valid_port_call(const SysConfig& cfg, const State& s, int id, PortMode mode,
                            const PortDirection* dir) {
  int pi = port_of_id(cfg, s, id);
  if (pi < 0) return false;
  const PortConf& pc = cfg.ports[pi];
  if (pc.mode != mode) return false;
  if (dir && pc.direction != *dir) return false;
  return pc.owner == partition_of_domain(s.current);
}

inline State do_create(const SysConfig& cfg, State s, int cfg_idx, PortMode mode) {
  const PortConf& pc = cfg.ports[cfg_idx];
  if (pc.mode != mode || pc.owner != partition_of_domain(s.current) || s.comm.created(cfg_idx))
    return fail(cfg, std::move(s));
  int id = cfg.portid_strategy == PortIdStrategy::static_from_config ? pc.static_id
                                                                     : s.next_port_id++;
  s.comm.cfg_port[id - 1] = (int16_t)cfg_idx;
  s.comm.id_of_port[cfg_idx] = (int16_t)id;
  s.comm.ports[id - 1].buf.clear();
  set_ret(s, Value::port_id(id));
  return s;
}

inline State do_get_portid(const SysConfig& cfg, State s, int cfg_idx, PortMode mode) {
  const PortConf& pc = cfg.ports[cfg_idx];
  if (pc.mode != mode || pc.owner != partition_of_domain(s.current) || !s.comm.created(cfg_idx))
    return fail(cfg, std::move(s));
  set_ret(s, Value::port_id(s.comm.id_of_port[cfg_idx]));
  return s;
}

inline State do_write_sampling(const SysConfig& cfg, State s, int id, int msg) {
  PortDirection src = PortDirection::source;
  if (!valid_port_call(cfg, s, id, PortMode::sampling, &src)) return fail(cfg, std::move(s));
  s.comm.ports[id - 1].buf.assign(1, (int8_t)msg);
  set_ret(s, Value::status(StatusCode::no_error));
  return s;
}

inline State do_read_sampling(const SysConfig& cfg, State s, int id) {
  PortDirection dst = PortDirection::destination;
  if (!valid_port_call(cfg, s, id, PortMode::sampling, &dst)) return fail(cfg, std::move(s));
  const auto& buf = s.comm.ports[id - 1].buf;
  set_ret(s, buf.empty() ? Value::status(StatusCode::none) : Value::msg(buf[0]));
  return s;
}

// Destination status reports how much arrived; source status only confirms
// the port exists. A count on the source side would let its owner query a
// buffer that is deliberately outside every partition view.
inline State do_get_sampling_status(const SysConfig& cfg, State s, int id) {
  if (!valid_port_call(cfg, s, id, PortMode::sampling, nullptr)) return fail(cfg, std::move(s));
  const PortConf& pc = cfg.ports[port_of_id(cfg, s, id)];
  if (pc.direction == PortDirection::source)
    set_ret(s, Value::status(StatusCode::exists));
  else
    set_ret(s, Value::count((int)s.comm.ports[id - 1].buf.size()));
  return s;
}

inline State do_send_queuing(const SysConfig& cfg, State s, int id, int msg,
                             SemanticsVariant variant) {
  PortDirection src = PortDirection::source;
  if (!valid_port_call(cfg, s, id, PortMode::queuing, &src)) return fail(cfg, std::move(s));
  auto& buf = s.comm.ports[id - 1].buf;
  int cap = cfg.ports[port_of_id(cfg, s, id)].capacity;
  if ((int)buf.size() >= cap) {
    // arinc reports the refusal; fixed succeeds silently and loses the message.
    set_ret(s, Value::status(variant == SemanticsVariant::arinc ? StatusCode::not_available
                                                                : StatusCode::no_error));
    return s;
  }
  buf.push_back((int8_t)msg);
  set_ret(s, Value::status(StatusCode::no_error));
  return s;
}

inline State do_receive_queuing(const SysConfig& cfg, State s, int id) {
  PortDirection dst = PortDirection::destination;
  if (!valid_port_call(cfg, s, id, PortMode::queuing, &dst)) return fail(cfg, std::move(s));
  auto& buf = s.comm.ports[id - 1].buf;
  if (buf.empty()) {
    set_ret(s, Value::status(StatusCode::none));
    return s;
  }
  int8_t head = buf[0];
  buf.erase(buf.begin());
  set_ret(s, Value::msg(head));
  return s;
}

inline State do_get_queuing_status(const SysConfig& cfg, State s, int id) {
  if (!valid_port_call(cfg, s, id, PortMode::queuing, nullptr)) return fail(cfg, std::move(s));
  const PortConf& pc = cfg.ports[port_of_id(cfg, s, id)];
  // A queuing source owner learns only that the port exists; exposing the
  // fill level here would leak the transmitter's drains to the sender.
  set_ret(s, pc.direction == PortDirection::source
                 ? Value::status(StatusCode::exists)
                 : Value::count((int)s.comm.ports[id - 1].buf.size()));
  return s;
}

inline State do_clear_queuing(const SysConfig& cfg, State s, int id) {
  PortDirection dst = PortDirection::destination;
  if (!valid_port_call(cfg, s, id, PortMode::queuing, &dst)) return fail(cfg, std::move(s));
  s.comm.ports[id - 1].buf.clear();
  set_ret(s, Value::status(StatusCode::no_error));
  return s;
}

inline State do_transfer_sampling(const SysConfig& cfg, State s, int ch_idx) {
  const ChannelConf& ch = cfg.channels[ch_idx];
  int sid = s.comm.id_of_port[ch.source];
  if (sid == 0) return s;
  for (int d : ch.dests)
    if (s.comm.id_of_port[d] == 0) return s;
  const auto& src = s.comm.ports[sid - 1].buf;
  if (src.empty()) return s;
  // Broadcast copy; the source keeps its message.
  for (int d : ch.dests) s.comm.ports[s.comm.id_of_port[d] - 1].buf = src;
  return s;
}

inline State do_transfer_queuing(const SysConfig& cfg, State s, int ch_idx,
                                 SemanticsVariant variant) {
  const ChannelConf& ch = cfg.channels[ch_idx];
  int sid = s.comm.id_of_port[ch.source];
  int did = s.comm.id_of_port[ch.dests[0]];
  if (sid == 0 || did == 0) return s;
  auto& src = s.comm.ports[sid - 1].buf;
  if (src.empty()) return s;
  auto& dst = s.comm.ports[did - 1].buf;
  bool full = (int)dst.size() >= ch.capacity;
  if (variant == SemanticsVariant::arinc) {
    // No-loss transfer: a full destination stalls the whole step.
    if (full) return s;
    dst.push_back(src[0]);
    src.erase(src.begin());
    return s;
  }
  // May-lose transfer: the head always leaves the source; a full destination
  // destroys it.
  int8_t head = src[0];
  src.erase(src.begin());
  if (!full) dst.push_back(head);
  return s;
}

} // namespace detail

// Total transition function. Disabled events stutter; invalid hypercalls
// leave everything untouched except the caller's result register.
inline State exec_event(const SysConfig& cfg, const State& s0, const Event& e,
                        SemanticsVariant variant) {
  if (!event_enabled(s0, e)) return s0;
  State s = s0;
  using detail::fail;
  switch (e.kind) {
    case EventKind::create_sampling_port:
      return detail::do_create(cfg, std::move(s), e.arg, PortMode::sampling);
    case EventKind::write_sampling_message:
      return detail::do_write_sampling(cfg, std::move(s), e.arg, e.msg);
    case EventKind::read_sampling_message:
      return detail::do_read_sampling(cfg, std::move(s), e.arg);
    case EventKind::get_sampling_portid:
      return detail::do_get_portid(cfg, std::move(s), e.arg, PortMode::sampling);
    case EventKind::get_sampling_portstatus:
      return detail::do_get_sampling_status(cfg, std::move(s), e.arg);
    case EventKind::create_queuing_port:
      return detail::do_create(cfg, std::move(s), e.arg, PortMode::queuing);
    case EventKind::send_queuing_message:
      return detail::do_send_queuing(cfg, std::move(s), e.arg, e.msg, variant);
    case EventKind::receive_queuing_message:
      return detail::do_receive_queuing(cfg, std::move(s), e.arg);
    case EventKind::get_queuing_portid:
      return detail::do_get_portid(cfg, std::move(s), e.arg, PortMode::queuing);
    case EventKind::get_queuing_portstatus:
      return detail::do_get_queuing_status(cfg, std::move(s), e.arg);
    case EventKind::clear_queuing_port:
      return detail::do_clear_queuing(cfg, std::move(s), e.arg);
    case EventKind::schedule:
      s.current = e.arg;
      return s;
    case EventKind::transfer_sampling:
      return detail::do_transfer_sampling(cfg, std::move(s), e.arg);
    case EventKind::transfer_queuing:
      return detail::do_transfer_queuing(cfg, std::move(s), e.arg, variant);
    case EventKind::partition_action:
      detail::set_ret(s, Value::action(e.arg));
      return s;
    case EventKind::init:
      return s;
  }
  return s;
}

inline State execute(const SysConfig& cfg, std::span<const Event> events, State s,
                     SemanticsVariant variant) {
  for (const Event& e : events) s = exec_event(cfg, s, e, variant);
  return s;
}

} // namespace skiff
