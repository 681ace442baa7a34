#pragma once

#include <functional>

#include "skiff/reach.hpp"

namespace skiff {

// Pre/postcondition cases for the kernel API, stated independently of the
// kernel's own dispatch logic so they can catch it lying. `kind` restricts
// which events a case applies to (-1 = every event, including a synthetic
// boot event appended to the alphabet). A case holds when every reachable
// (state, event) instance satisfying `pre` steps to a state satisfying
// `post`.
struct HoareCase {
  std::string name;
  int kind; // EventKind value, or -1
  std::function<bool(const Model&, const State&, const Event&)> pre;
  std::function<bool(const Model&, const State&, const Event&, const State&)> post;
};

struct HoareWitness {
  std::vector<Event> path; // from the initial state to the failing state
  Event event;
};

struct HoareResult {
  std::string name;
  int kind = -1;
  uint64_t instances = 0;
  uint64_t violations = 0;
  std::optional<HoareWitness> witness;
  bool ok() const { return violations == 0; }
};

struct HoareReport {
  bool ok = true;
  std::vector<HoareResult> results;
  int kinds_spanned = 0; // distinct explicit kinds across the suite
};

namespace hdetail {

inline bool normal_partition(const State& s) {
  return is_partition_domain(s.current) &&
         s.part_mode[partition_of_domain(s.current)] == k_mode_normal;
}

inline bool call_enabled(const State& s, const Event& e) {
  if (e.kind == EventKind::schedule) return true;
  if (e.kind == EventKind::init) return false;
  if (e.kind == EventKind::transfer_sampling || e.kind == EventKind::transfer_queuing)
    return s.current == k_transmitter;
  return normal_partition(s);
}

// Config index of the port a runtime id denotes, -1 if the id denotes none.
inline int port_by_id(const Model& m, const State& s, int id) {
  if (id < 1 || id > (int)m.cfg.n_ports()) return -1;
  return s.comm.cfg_port[id - 1];
}

inline const std::vector<int8_t>* buf_of(const State& s, int cfg_idx) {
  int id = s.comm.id_of_port[cfg_idx];
  return id ? &s.comm.ports[id - 1].buf : nullptr;
}

inline bool owns(const Model& m, const State& s, int cfg_idx) {
  return is_partition_domain(s.current) &&
         m.cfg.ports[cfg_idx].owner == partition_of_domain(s.current);
}

// A valid (id, mode[, direction]) call from the current partition.
inline bool good_call(const Model& m, const State& s, int id, PortMode mode,
                      std::optional<PortDirection> dir = std::nullopt) {
  int j = port_by_id(m, s, id);
  if (j < 0) return false;
  const PortConf& pc = m.cfg.ports[j];
  if (pc.mode != mode || !owns(m, s, j)) return false;
  return !dir || pc.direction == *dir;
}

// Everything equal except the named ret register, the named ports and
// (optionally) the port id counter.
inline bool framed(const Model& m, const State& a, const State& b, int ret_dom,
                   const std::vector<int>& touched, bool allow_counter = false) {
  if (a.current != b.current || a.part_mode != b.part_mode) return false;
  if (!allow_counter && a.next_port_id != b.next_port_id) return false;
  for (int d = 0; d < m.cfg.n_domains(); ++d)
    if (d != ret_dom && !(a.locals[d] == b.locals[d])) return false;
  for (int j = 0; j < (int)m.cfg.n_ports(); ++j) {
    bool skip = false;
    for (int t : touched) skip |= t == j;
    if (skip) continue;
    if (a.comm.id_of_port[j] != b.comm.id_of_port[j]) return false;
    const auto* ba = buf_of(a, j);
    const auto* bb = buf_of(b, j);
    if ((ba == nullptr) != (bb == nullptr)) return false;
    if (ba && *ba != *bb) return false;
  }
  return true;
}

inline Value ret_of(const State& s, int dom) { return s.locals[dom].ret; }

} // namespace hdetail

inline std::vector<HoareCase> builtin_hoare_suite() {
  using namespace hdetail;
  using K = EventKind;
  std::vector<HoareCase> cases;
  auto add = [&](std::string name, K kind, auto pre, auto post) {
    cases.push_back({std::move(name), (int)kind, pre, post});
  };

  auto create_ok = [](const Model& m, const State& s, const Event& e, PortMode mode) {
    if (!call_enabled(s, e)) return false;
    const PortConf& pc = m.cfg.ports[e.arg];
    return pc.mode == mode && owns(m, s, e.arg) && !s.comm.created(e.arg);
  };
  auto create_post = [](const Model& m, const State& s, const Event& e, const State& t) {
    int want = m.cfg.portid_strategy == PortIdStrategy::static_from_config
                   ? m.cfg.ports[e.arg].static_id
                   : s.next_port_id;
    bool counter = m.cfg.portid_strategy == PortIdStrategy::runtime_counter;
    return t.comm.id_of_port[e.arg] == want && buf_of(t, e.arg) && buf_of(t, e.arg)->empty() &&
           ret_of(t, s.current) == Value::port_id(want) &&
           t.next_port_id == s.next_port_id + (counter ? 1 : 0) &&
           framed(m, s, t, s.current, {e.arg}, true);
  };
  auto unchanged_but_ret = [](const Model& m, const State& s, const State& t, Value want) {
    return ret_of(t, s.current) == want && framed(m, s, t, s.current, {});
  };
  auto fails_invalid = [unchanged_but_ret](const Model& m, const State& s, const Event&,
                                           const State& t) {
    return unchanged_but_ret(m, s, t, Value::status(StatusCode::invalid_param));
  };

  add(
      "create sampling port binds a fresh id and empty buffer", K::create_sampling_port,
      [create_ok](const Model& m, const State& s, const Event& e) {
        return create_ok(m, s, e, PortMode::sampling);
      },
      create_post);
  add(
      "create sampling port rejects a recreate", K::create_sampling_port,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) && m.cfg.ports[e.arg].mode == PortMode::sampling &&
               owns(m, s, e.arg) && s.comm.created(e.arg);
      },
      fails_invalid);
  add(
      "create sampling port rejects wrong mode or foreign owner", K::create_sampling_port,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               (m.cfg.ports[e.arg].mode != PortMode::sampling || !owns(m, s, e.arg));
      },
      fails_invalid);

  add(
      "write sampling message overwrites the single slot", K::write_sampling_message,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               good_call(m, s, e.arg, PortMode::sampling, PortDirection::source);
      },
      [](const Model& m, const State& s, const Event& e, const State& t) {
        int j = port_by_id(m, s, e.arg);
        return ret_of(t, s.current) == Value::status(StatusCode::no_error) &&
               *buf_of(t, j) == std::vector<int8_t>{(int8_t)e.msg} &&
               framed(m, s, t, s.current, {j});
      });
  add(
      "write sampling message rejects bad id, mode, direction or owner", K::write_sampling_message,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               !good_call(m, s, e.arg, PortMode::sampling, PortDirection::source);
      },
      fails_invalid);

  add(
      "read sampling message returns the stored message without consuming it",
      K::read_sampling_message,
      [](const Model& m, const State& s, const Event& e) {
        if (!call_enabled(s, e) ||
            !good_call(m, s, e.arg, PortMode::sampling, PortDirection::destination))
          return false;
        return !buf_of(s, port_by_id(m, s, e.arg))->empty();
      },
      [](const Model& m, const State& s, const Event& e, const State& t) {
        int j = port_by_id(m, s, e.arg);
        return ret_of(t, s.current) == Value::msg((*buf_of(s, j))[0]) &&
               framed(m, s, t, s.current, {});
      });
  add(
      "read sampling message reports an empty port", K::read_sampling_message,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               good_call(m, s, e.arg, PortMode::sampling, PortDirection::destination) &&
               buf_of(s, port_by_id(m, s, e.arg))->empty();
      },
      [unchanged_but_ret](const Model& m, const State& s, const Event&, const State& t) {
        return unchanged_but_ret(m, s, t, Value::status(StatusCode::none));
      });
  add(
      "read sampling message rejects bad id, mode, direction or owner", K::read_sampling_message,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               !good_call(m, s, e.arg, PortMode::sampling, PortDirection::destination);
      },
      fails_invalid);

  add(
      "get sampling port id returns the bound id", K::get_sampling_portid,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) && m.cfg.ports[e.arg].mode == PortMode::sampling &&
               owns(m, s, e.arg) && s.comm.created(e.arg);
      },
      [unchanged_but_ret](const Model& m, const State& s, const Event& e, const State& t) {
        return unchanged_but_ret(m, s, t, Value::port_id(s.comm.id_of_port[e.arg]));
      });
  add(
      "get sampling port id rejects uncreated, wrong mode or foreign ports",
      K::get_sampling_portid,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) && !(m.cfg.ports[e.arg].mode == PortMode::sampling &&
                                       owns(m, s, e.arg) && s.comm.created(e.arg));
      },
      fails_invalid);

  add(
      "get sampling port status counts a destination slot", K::get_sampling_portstatus,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               good_call(m, s, e.arg, PortMode::sampling, PortDirection::destination);
      },
      [unchanged_but_ret](const Model& m, const State& s, const Event& e, const State& t) {
        int j = port_by_id(m, s, e.arg);
        return unchanged_but_ret(m, s, t, Value::count((int)buf_of(s, j)->size()));
      });
  add(
      "get sampling port status marks a source port as existing", K::get_sampling_portstatus,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               good_call(m, s, e.arg, PortMode::sampling, PortDirection::source);
      },
      [unchanged_but_ret](const Model& m, const State& s, const Event&, const State& t) {
        return unchanged_but_ret(m, s, t, Value::status(StatusCode::exists));
      });
  add(
      "get sampling port status rejects bad id, mode or owner", K::get_sampling_portstatus,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) && !good_call(m, s, e.arg, PortMode::sampling);
      },
      fails_invalid);

  add(
      "create queuing port binds a fresh id and empty buffer", K::create_queuing_port,
      [create_ok](const Model& m, const State& s, const Event& e) {
        return create_ok(m, s, e, PortMode::queuing);
      },
      create_post);
  add(
      "create queuing port rejects a recreate", K::create_queuing_port,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) && m.cfg.ports[e.arg].mode == PortMode::queuing &&
               owns(m, s, e.arg) && s.comm.created(e.arg);
      },
      fails_invalid);
  add(
      "create queuing port rejects wrong mode or foreign owner", K::create_queuing_port,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               (m.cfg.ports[e.arg].mode != PortMode::queuing || !owns(m, s, e.arg));
      },
      fails_invalid);

  add(
      "send queuing message appends below capacity", K::send_queuing_message,
      [](const Model& m, const State& s, const Event& e) {
        if (!call_enabled(s, e) ||
            !good_call(m, s, e.arg, PortMode::queuing, PortDirection::source))
          return false;
        int j = port_by_id(m, s, e.arg);
        return (int)buf_of(s, j)->size() < m.cfg.ports[j].capacity;
      },
      [](const Model& m, const State& s, const Event& e, const State& t) {
        int j = port_by_id(m, s, e.arg);
        auto want = *buf_of(s, j);
        want.push_back((int8_t)e.msg);
        return ret_of(t, s.current) == Value::status(StatusCode::no_error) &&
               *buf_of(t, j) == want && framed(m, s, t, s.current, {j});
      });
  add(
      "send queuing message on a full port reports unavailability", K::send_queuing_message,
      [](const Model& m, const State& s, const Event& e) {
        if (m.variant != SemanticsVariant::arinc || !call_enabled(s, e) ||
            !good_call(m, s, e.arg, PortMode::queuing, PortDirection::source))
          return false;
        int j = port_by_id(m, s, e.arg);
        return (int)buf_of(s, j)->size() >= m.cfg.ports[j].capacity;
      },
      [unchanged_but_ret](const Model& m, const State& s, const Event&, const State& t) {
        return unchanged_but_ret(m, s, t, Value::status(StatusCode::not_available));
      });
  add(
      "send queuing message on a full port silently drops", K::send_queuing_message,
      [](const Model& m, const State& s, const Event& e) {
        if (m.variant != SemanticsVariant::fixed || !call_enabled(s, e) ||
            !good_call(m, s, e.arg, PortMode::queuing, PortDirection::source))
          return false;
        int j = port_by_id(m, s, e.arg);
        return (int)buf_of(s, j)->size() >= m.cfg.ports[j].capacity;
      },
      [unchanged_but_ret](const Model& m, const State& s, const Event&, const State& t) {
        return unchanged_but_ret(m, s, t, Value::status(StatusCode::no_error));
      });
  add(
      "send queuing message rejects bad id, mode, direction or owner", K::send_queuing_message,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               !good_call(m, s, e.arg, PortMode::queuing, PortDirection::source);
      },
      fails_invalid);

  add(
      "receive queuing message pops the head in order", K::receive_queuing_message,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               good_call(m, s, e.arg, PortMode::queuing, PortDirection::destination) &&
               !buf_of(s, port_by_id(m, s, e.arg))->empty();
      },
      [](const Model& m, const State& s, const Event& e, const State& t) {
        int j = port_by_id(m, s, e.arg);
        auto want = *buf_of(s, j);
        int8_t head = want.front();
        want.erase(want.begin());
        return ret_of(t, s.current) == Value::msg(head) && *buf_of(t, j) == want &&
               framed(m, s, t, s.current, {j});
      });
  add(
      "receive queuing message reports an empty port", K::receive_queuing_message,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               good_call(m, s, e.arg, PortMode::queuing, PortDirection::destination) &&
               buf_of(s, port_by_id(m, s, e.arg))->empty();
      },
      [unchanged_but_ret](const Model& m, const State& s, const Event&, const State& t) {
        return unchanged_but_ret(m, s, t, Value::status(StatusCode::none));
      });
  add(
      "receive queuing message rejects bad id, mode, direction or owner",
      K::receive_queuing_message,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               !good_call(m, s, e.arg, PortMode::queuing, PortDirection::destination);
      },
      fails_invalid);

  add(
      "get queuing port id returns the bound id", K::get_queuing_portid,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) && m.cfg.ports[e.arg].mode == PortMode::queuing &&
               owns(m, s, e.arg) && s.comm.created(e.arg);
      },
      [unchanged_but_ret](const Model& m, const State& s, const Event& e, const State& t) {
        return unchanged_but_ret(m, s, t, Value::port_id(s.comm.id_of_port[e.arg]));
      });
  add(
      "get queuing port id rejects uncreated, wrong mode or foreign ports", K::get_queuing_portid,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) && !(m.cfg.ports[e.arg].mode == PortMode::queuing &&
                                       owns(m, s, e.arg) && s.comm.created(e.arg));
      },
      fails_invalid);

  add(
      "get queuing port status counts a destination queue", K::get_queuing_portstatus,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               good_call(m, s, e.arg, PortMode::queuing, PortDirection::destination);
      },
      [unchanged_but_ret](const Model& m, const State& s, const Event& e, const State& t) {
        int j = port_by_id(m, s, e.arg);
        return unchanged_but_ret(m, s, t, Value::count((int)buf_of(s, j)->size()));
      });
  add(
      "get queuing port status marks a source port as existing", K::get_queuing_portstatus,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               good_call(m, s, e.arg, PortMode::queuing, PortDirection::source);
      },
      [unchanged_but_ret](const Model& m, const State& s, const Event&, const State& t) {
        return unchanged_but_ret(m, s, t, Value::status(StatusCode::exists));
      });
  add(
      "get queuing port status rejects bad id, mode or owner", K::get_queuing_portstatus,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) && !good_call(m, s, e.arg, PortMode::queuing);
      },
      fails_invalid);

  add(
      "clear queuing port empties a destination queue", K::clear_queuing_port,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               good_call(m, s, e.arg, PortMode::queuing, PortDirection::destination);
      },
      [](const Model& m, const State& s, const Event& e, const State& t) {
        int j = port_by_id(m, s, e.arg);
        return ret_of(t, s.current) == Value::status(StatusCode::no_error) &&
               buf_of(t, j)->empty() && framed(m, s, t, s.current, {j});
      });
  add(
      "clear queuing port rejects bad id, mode, direction or owner", K::clear_queuing_port,
      [](const Model& m, const State& s, const Event& e) {
        return call_enabled(s, e) &&
               !good_call(m, s, e.arg, PortMode::queuing, PortDirection::destination);
      },
      fails_invalid);

  add(
      "schedule switches the running domain and nothing else", K::schedule,
      [](const Model&, const State&, const Event&) { return true; },
      [](const Model&, const State& s, const Event& e, const State& t) {
        State u = t;
        u.current = s.current;
        return t.current == e.arg && u == s;
      });

  auto channel_ready = [](const Model& m, const State& s, int ch_idx) {
    const ChannelConf& ch = m.cfg.channels[ch_idx];
    if (!s.comm.created(ch.source)) return false;
    for (int dj : ch.dests)
      if (!s.comm.created(dj)) return false;
    return !buf_of(s, ch.source)->empty();
  };

  add(
      "sampling transfer copies the source message to every destination", K::transfer_sampling,
      [channel_ready](const Model& m, const State& s, const Event& e) {
        return s.current == k_transmitter && channel_ready(m, s, e.arg);
      },
      [](const Model& m, const State& s, const Event& e, const State& t) {
        const ChannelConf& ch = m.cfg.channels[e.arg];
        auto src = *buf_of(s, ch.source);
        if (*buf_of(t, ch.source) != src) return false;
        for (int dj : ch.dests)
          if (*buf_of(t, dj) != src) return false;
        return framed(m, s, t, -1, ch.dests);
      });
  add(
      "sampling transfer without created ports or a message is a no-op", K::transfer_sampling,
      [channel_ready](const Model& m, const State& s, const Event& e) {
        return s.current == k_transmitter && !channel_ready(m, s, e.arg);
      },
      [](const Model&, const State& s, const Event&, const State& t) { return s == t; });

  add(
      "queuing transfer moves the head when the destination has room", K::transfer_queuing,
      [channel_ready](const Model& m, const State& s, const Event& e) {
        if (s.current != k_transmitter || !channel_ready(m, s, e.arg)) return false;
        const ChannelConf& ch = m.cfg.channels[e.arg];
        int dj = ch.dests[0];
        return (int)buf_of(s, dj)->size() < m.cfg.ports[dj].capacity;
      },
      [](const Model& m, const State& s, const Event& e, const State& t) {
        const ChannelConf& ch = m.cfg.channels[e.arg];
        int sj = ch.source, dj = ch.dests[0];
        auto src = *buf_of(s, sj);
        auto dst = *buf_of(s, dj);
        dst.push_back(src.front());
        src.erase(src.begin());
        return *buf_of(t, sj) == src && *buf_of(t, dj) == dst && framed(m, s, t, -1, {sj, dj});
      });
  add(
      "queuing transfer into a full destination backs off whole", K::transfer_queuing,
      [channel_ready](const Model& m, const State& s, const Event& e) {
        if (m.variant != SemanticsVariant::arinc) return false;
        if (s.current != k_transmitter || !channel_ready(m, s, e.arg)) return false;
        const ChannelConf& ch = m.cfg.channels[e.arg];
        int dj = ch.dests[0];
        return (int)buf_of(s, dj)->size() >= m.cfg.ports[dj].capacity;
      },
      [](const Model&, const State& s, const Event&, const State& t) { return s == t; });
  add(
      "queuing transfer into a full destination destroys the head", K::transfer_queuing,
      [channel_ready](const Model& m, const State& s, const Event& e) {
        if (m.variant != SemanticsVariant::fixed) return false;
        if (s.current != k_transmitter || !channel_ready(m, s, e.arg)) return false;
        const ChannelConf& ch = m.cfg.channels[e.arg];
        int dj = ch.dests[0];
        return (int)buf_of(s, dj)->size() >= m.cfg.ports[dj].capacity;
      },
      [](const Model& m, const State& s, const Event& e, const State& t) {
        const ChannelConf& ch = m.cfg.channels[e.arg];
        int sj = ch.source, dj = ch.dests[0];
        auto src = *buf_of(s, sj);
        src.erase(src.begin());
        return *buf_of(t, sj) == src && *buf_of(t, dj) == *buf_of(s, dj) &&
               framed(m, s, t, -1, {sj});
      });
  add(
      "queuing transfer without created ports or a message is a no-op", K::transfer_queuing,
      [channel_ready](const Model& m, const State& s, const Event& e) {
        return s.current == k_transmitter && !channel_ready(m, s, e.arg);
      },
      [](const Model&, const State& s, const Event&, const State& t) { return s == t; });

  add(
      "partition action leaves its token in the caller's register", K::partition_action,
      [](const Model&, const State& s, const Event& e) { return call_enabled(s, e); },
      [unchanged_but_ret](const Model& m, const State& s, const Event& e, const State& t) {
        return unchanged_but_ret(m, s, t, Value::action(e.arg));
      });

  cases.push_back(
      {"events not enabled for the running domain stutter", -1,
       [](const Model&, const State& s, const Event& e) { return !hdetail::call_enabled(s, e); },
       [](const Model&, const State& s, const Event&, const State& t) { return s == t; }});

  add(
      "the boot event is never enabled at runtime", K::init,
      [](const Model&, const State&, const Event&) { return true; },
      [](const Model&, const State& s, const Event&, const State& t) { return s == t; });

  return cases;
}

// Runs every case against every reachable (state, event) instance. The boot
// event is appended to the alphabet so its case is not vacuous.
inline HoareReport run_hoare_suite(const Model& m, const ReachableSet& rs,
                                   const std::vector<HoareCase>& cases) {
  HoareReport rep;
  std::vector<Event> events(m.alphabet.begin(), m.alphabet.end());
  events.push_back(Event{EventKind::init});

  std::array<bool, k_event_kinds> kind_seen{};
  for (const auto& c : cases) {
    HoareResult r;
    r.name = c.name;
    r.kind = c.kind;
    if (c.kind >= 0) kind_seen[c.kind] = true;
    for (int si = 0; si < rs.size(); ++si) {
      const State& s = rs.states[si];
      for (const Event& e : events) {
        if (c.kind >= 0 && (int)e.kind != c.kind) continue;
        if (!c.pre(m, s, e)) continue;
        r.instances++;
        State t = m.step(s, e);
        if (c.post(m, s, e, t)) continue;
        r.violations++;
        rep.ok = false;
        if (!r.witness) r.witness = HoareWitness{rs.path_to(m, si), e};
      }
    }
    rep.results.push_back(std::move(r));
  }
  for (bool b : kind_seen) rep.kinds_spanned += b;
  return rep;
}

inline HoareReport run_hoare_suite(const Model& m, const ReachableSet& rs) {
  return run_hoare_suite(m, rs, builtin_hoare_suite());
}

} // namespace skiff
