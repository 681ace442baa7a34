#pragma once

#include <algorithm>

#include "skiff/security.hpp"

namespace skiff {

// A self-contained violation record. prefix_a/prefix_b run from the initial
// state; the events before split_a/split_b reach the two start states, the
// rest are the distinguishing sequences demanded by the property. For the
// unwinding conditions the distinguishing step is `event` instead.
// replay() re-verifies the property-specific antecedents, not just the final
// view difference, so a minimized witness is still a genuine witness.
struct Counterexample {
  PropertyId property = PropertyId::noninterference;
  int observer = 0;
  std::vector<Event> prefix_a;
  std::vector<Event> prefix_b;
  int split_a = 0;
  int split_b = 0;
  std::optional<Event> event;
  std::string diff;

  int total_events() const {
    return (int)(prefix_a.size() + prefix_b.size()) + (event ? 1 : 0);
  }
};

struct Verdict {
  PropertyId property = PropertyId::noninterference;
  bool holds = true;
  int bound = 0;        // sequence length bound; 0 for the unwinding conditions
  int fail_length = -1; // shortest sequence length at which a violation appeared
  std::optional<Counterexample> witness;
};

struct ReplayOutcome {
  bool reproduced = false;
  std::string reason;
};

namespace detail {

inline std::span<const Event> reach_part(const std::vector<Event>& p, int split) {
  return {p.data(), (size_t)split};
}
inline std::span<const Event> seq_part(const std::vector<Event>& p, int split) {
  return {p.data() + split, p.size() - split};
}

inline bool same_events(std::span<const Event> a, std::span<const Event> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

} // namespace detail

// The pair of states whose d-views the witness claims to distinguish.
inline std::pair<State, State> witness_endpoints(const Model& m, const Counterexample& c) {
  State sa = m.run(m.s0, c.prefix_a);
  State sb = m.run(m.s0, c.prefix_b);
  if (!c.event) return {sa, sb};
  if (c.property == PropertyId::local_respect) return {sa, m.step(sa, *c.event)};
  return {m.step(sa, *c.event), m.step(sb, *c.event)};
}

inline ReplayOutcome replay(const Model& m, const Counterexample& c) {
  using detail::reach_part;
  using detail::same_events;
  using detail::seq_part;
  const int d = c.observer;
  if (d < 0 || d >= m.cfg.n_domains()) return {false, "unknown observer"};
  if (c.split_a < 0 || c.split_a > (int)c.prefix_a.size() || c.split_b < 0 ||
      c.split_b > (int)c.prefix_b.size())
    return {false, "split out of range"};

  auto require = [](bool ok, const char* what) -> std::optional<ReplayOutcome> {
    if (!ok) return ReplayOutcome{false, std::string("antecedent failed: ") + what};
    return std::nullopt;
  };

  State qa = m.run(m.s0, reach_part(c.prefix_a, c.split_a));
  State qb = m.run(m.s0, reach_part(c.prefix_b, c.split_b));
  auto seq_a = seq_part(c.prefix_a, c.split_a);
  auto seq_b = seq_part(c.prefix_b, c.split_b);

  bool needs_event = c.property == PropertyId::local_respect ||
                     c.property == PropertyId::weak_step_consistent;
  if (needs_event != c.event.has_value())
    return {false, needs_event ? "missing event" : "unexpected event"};

  std::optional<ReplayOutcome> bad;
  switch (c.property) {
    case PropertyId::noninterference:
      if ((bad = require(c.split_a == 0 && c.split_b == 0, "sequences must start at s0")))
        return *bad;
      if ((bad = require(same_events(c.prefix_b, ipurge(m, c.prefix_a, m.s0, d)),
                         "second sequence is not the purge of the first")))
        return *bad;
      break;
    case PropertyId::weak_noninterference:
      if ((bad = require(c.split_a == 0 && c.split_b == 0, "sequences must start at s0")))
        return *bad;
      if ((bad = require(same_events(ipurge(m, c.prefix_a, m.s0, d),
                                     ipurge(m, c.prefix_b, m.s0, d)),
                         "purges differ")))
        return *bad;
      break;
    case PropertyId::noninterference_r:
      if ((bad = require(same_events(reach_part(c.prefix_a, c.split_a),
                                     reach_part(c.prefix_b, c.split_b)),
                         "reach prefixes differ")))
        return *bad;
      if ((bad = require(same_events(seq_b, ipurge(m, seq_a, qa, d)),
                         "second sequence is not the purge of the first")))
        return *bad;
      break;
    case PropertyId::weak_noninterference_r:
      if ((bad = require(same_events(reach_part(c.prefix_a, c.split_a),
                                     reach_part(c.prefix_b, c.split_b)),
                         "reach prefixes differ")))
        return *bad;
      if ((bad = require(same_events(ipurge(m, seq_a, qa, d), ipurge(m, seq_b, qa, d)),
                         "purges differ")))
        return *bad;
      break;
    case PropertyId::nonleakage:
      if ((bad = require(same_events(seq_a, seq_b), "sequences differ"))) return *bad;
      if ((bad = require(vpeq(m.cfg, m.tx_view, k_scheduler, qa, qb),
                         "start states not scheduler-equivalent")))
        return *bad;
      if ((bad = require(vpeq_set(m.cfg, m.tx_view, sources(m, seq_a, qa, d), qa, qb),
                         "start states differ on a source domain")))
        return *bad;
      break;
    case PropertyId::noninfluence:
      if ((bad = require(vpeq(m.cfg, m.tx_view, k_scheduler, qa, qb),
                         "start states not scheduler-equivalent")))
        return *bad;
      if ((bad = require(vpeq_set(m.cfg, m.tx_view, sources(m, seq_a, qa, d), qa, qb),
                         "start states differ on a source domain")))
        return *bad;
      if ((bad = require(same_events(ipurge(m, seq_a, qa, d), ipurge(m, seq_b, qa, d)),
                         "purges differ")))
        return *bad;
      break;
    case PropertyId::strong_noninfluence:
      if ((bad = require(vpeq(m.cfg, m.tx_view, k_scheduler, qa, qb),
                         "start states not scheduler-equivalent")))
        return *bad;
      if ((bad = require(vpeq_set(m.cfg, m.tx_view, sources(m, seq_a, qa, d), qa, qb),
                         "start states differ on a source domain")))
        return *bad;
      if ((bad = require(same_events(seq_b, ipurge(m, seq_a, qb, d)),
                         "second sequence is not the purge at the second start state")))
        return *bad;
      break;
    case PropertyId::local_respect: {
      State sa = m.run(qa, seq_a);
      int u = domain_of_event(sa, *c.event);
      if ((bad = require(!m.policy.allows(u, d), "policy allows the flow"))) return *bad;
      if (vpeq(m.cfg, m.tx_view, d, sa, m.step(sa, *c.event)))
        return {false, "views equal: no violation"};
      return {true, "local_respect violation reproduced"};
    }
    case PropertyId::weak_step_consistent: {
      State sa = m.run(qa, seq_a);
      State sb = m.run(qb, seq_b);
      int u = domain_of_event(sa, *c.event);
      if ((bad = require(vpeq(m.cfg, m.tx_view, d, sa, sb), "states distinguishable by observer")))
        return *bad;
      if ((bad = require(vpeq(m.cfg, m.tx_view, k_scheduler, sa, sb),
                         "states not scheduler-equivalent")))
        return *bad;
      if ((bad = require(m.policy.allows(u, d), "policy forbids the flow"))) return *bad;
      if ((bad = require(vpeq(m.cfg, m.tx_view, u, sa, sb),
                         "states distinguishable by the event domain")))
        return *bad;
      if (vpeq(m.cfg, m.tx_view, d, m.step(sa, *c.event), m.step(sb, *c.event)))
        return {false, "views equal: no violation"};
      return {true, "weak_step_consistent violation reproduced"};
    }
  }
  State sa = m.run(qa, seq_a);
  State sb = m.run(qb, seq_b);
  if (vpeq(m.cfg, m.tx_view, d, sa, sb)) return {false, "views equal: no violation"};
  return {true, std::string(property_name(c.property)) + " violation reproduced"};
}

inline std::string render_witness_diff(const Model& m, const Counterexample& c) {
  auto [sa, sb] = witness_endpoints(m, c);
  ViewDiff vd = view_diff(m.cfg, m.tx_view, c.observer, sa, sb);
  if (!vd.differs()) return "";
  return vd.component + ": " + vd.left + " vs " + vd.right;
}

namespace detail {

// Rules that keep prefix_b consistent while prefix_a shrinks, for the
// properties where prefix_b is determined by prefix_a.
inline void rederive_b(const Model& m, Counterexample& c) {
  switch (c.property) {
    case PropertyId::noninterference:
    case PropertyId::weak_noninterference:
      c.prefix_b = ipurge(m, c.prefix_a, m.s0, c.observer);
      c.split_b = 0;
      break;
    case PropertyId::noninterference_r:
    case PropertyId::weak_noninterference_r: {
      State qa = m.run(m.s0, reach_part(c.prefix_a, c.split_a));
      std::vector<Event> nb(c.prefix_a.begin(), c.prefix_a.begin() + c.split_a);
      auto purged = ipurge(m, seq_part(c.prefix_a, c.split_a), qa, c.observer);
      nb.insert(nb.end(), purged.begin(), purged.end());
      c.prefix_b = std::move(nb);
      c.split_b = c.split_a;
      break;
    }
    case PropertyId::strong_noninfluence: {
      State qb = m.run(m.s0, reach_part(c.prefix_b, c.split_b));
      std::vector<Event> nb(c.prefix_b.begin(), c.prefix_b.begin() + c.split_b);
      auto purged = ipurge(m, seq_part(c.prefix_a, c.split_a), qb, c.observer);
      nb.insert(nb.end(), purged.begin(), purged.end());
      c.prefix_b = std::move(nb);
      break;
    }
    case PropertyId::nonleakage: {
      std::vector<Event> nb(c.prefix_b.begin(), c.prefix_b.begin() + c.split_b);
      auto sq = seq_part(c.prefix_a, c.split_a);
      nb.insert(nb.end(), sq.begin(), sq.end());
      c.prefix_b = std::move(nb);
      break;
    }
    case PropertyId::local_respect:
      c.prefix_b = c.prefix_a;
      c.split_b = c.split_a;
      break;
    default:
      break;
  }
}

} // namespace detail

// Greedy deterministic shrinking: repeatedly drop the leftmost event whose
// removal still replays as a violation, in prefix_a then prefix_b, until a
// full pass removes nothing. Dependent parts of prefix_b are recomputed from
// prefix_a on every attempt.
inline Counterexample minimize(const Model& m, Counterexample c) {
  auto try_candidate = [&](Counterexample& cand) {
    detail::rederive_b(m, cand);
    return replay(m, cand).reproduced;
  };
  bool b_independent = c.property == PropertyId::noninfluence ||
                       c.property == PropertyId::nonleakage ||
                       c.property == PropertyId::strong_noninfluence ||
                       c.property == PropertyId::weak_step_consistent;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < c.prefix_a.size(); ++i) {
      Counterexample cand = c;
      cand.prefix_a.erase(cand.prefix_a.begin() + i);
      if ((int)i < cand.split_a) cand.split_a--;
      if (try_candidate(cand)) {
        c = std::move(cand);
        changed = true;
        break;
      }
    }
    if (changed) continue;
    if (!b_independent) continue;
    // For these properties prefix_b is a free witness half of its own;
    // only its reach part may be shrunk for strong_noninfluence and
    // nonleakage, whose tail is rederived.
    size_t b_limit = (c.property == PropertyId::strong_noninfluence ||
                      c.property == PropertyId::nonleakage)
                         ? (size_t)c.split_b
                         : c.prefix_b.size();
    for (size_t i = 0; i < b_limit; ++i) {
      Counterexample cand = c;
      cand.prefix_b.erase(cand.prefix_b.begin() + i);
      if ((int)i < cand.split_b) cand.split_b--;
      if (try_candidate(cand)) {
        c = std::move(cand);
        changed = true;
        break;
      }
    }
  }
  c.diff = render_witness_diff(m, c);
  return c;
}

// The verbatim command the reports print next to every witness.
inline std::string replay_command(const Model& m, const std::string& program,
                                  const std::string& config_path, const Counterexample& c) {
  auto quote = [](const std::string& s) { return "'" + s + "'"; };
  std::string cmd = program + " replay --config " + config_path + " --semantics " +
                    variant_name(m.variant) + " --portids " +
                    (m.cfg.portid_strategy == PortIdStrategy::static_from_config ? "static"
                                                                                 : "counter") +
                    " --transmitter-view " + transmitter_view_name(m.tx_view) + " --property " +
                    property_name(c.property) + " --observer " +
                    quote(m.cfg.domain_name(c.observer)) + " --prefix-a " +
                    quote(render_trace(m.cfg, c.prefix_a)) + " --prefix-b " +
                    quote(render_trace(m.cfg, c.prefix_b));
  if (c.split_a) cmd += " --split-a " + std::to_string(c.split_a);
  if (c.split_b) cmd += " --split-b " + std::to_string(c.split_b);
  if (c.event) cmd += " --event " + quote(render_event(m.cfg, *c.event));
  return cmd;
}

} // namespace skiff
