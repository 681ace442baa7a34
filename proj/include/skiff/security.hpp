#pragma once

#include <optional>
#include <span>

#include "skiff/model.hpp"

namespace skiff {

enum class PropertyId : uint8_t {
  noninterference,
  weak_noninterference,
  noninterference_r,
  weak_noninterference_r,
  nonleakage,
  noninfluence,
  strong_noninfluence,
  local_respect,
  weak_step_consistent,
};

constexpr int k_properties = 9;
constexpr int k_bounded_properties = 7; // the first seven; the last two are unwinding conditions

inline const char* property_name(PropertyId p) {
  switch (p) {
    case PropertyId::noninterference: return "noninterference";
    case PropertyId::weak_noninterference: return "weak_noninterference";
    case PropertyId::noninterference_r: return "noninterference_r";
    case PropertyId::weak_noninterference_r: return "weak_noninterference_r";
    case PropertyId::nonleakage: return "nonleakage";
    case PropertyId::noninfluence: return "noninfluence";
    case PropertyId::strong_noninfluence: return "strong_noninfluence";
    case PropertyId::local_respect: return "local_respect";
    case PropertyId::weak_step_consistent: return "weak_step_consistent";
  }
  return "?";
}

inline std::optional<PropertyId> property_from_name(const std::string& n) {
  for (int i = 0; i < k_properties; ++i)
    if (n == property_name((PropertyId)i)) return (PropertyId)i;
  return std::nullopt;
}

// The implication lattice between the properties, encoded as data so the
// report audit can assert that no verdict vector ever violates it: whenever
// every premise holds (at equal bound), the conclusion must hold.
struct Implication {
  std::vector<PropertyId> premises;
  PropertyId conclusion;
};

inline const std::vector<Implication>& property_implications() {
  static const std::vector<Implication> rules = {
      {{PropertyId::strong_noninfluence}, PropertyId::noninfluence},
      {{PropertyId::strong_noninfluence}, PropertyId::noninterference_r},
      {{PropertyId::strong_noninfluence}, PropertyId::nonleakage},
      {{PropertyId::noninterference_r}, PropertyId::noninterference},
      {{PropertyId::noninterference}, PropertyId::weak_noninterference},
      {{PropertyId::local_respect, PropertyId::weak_step_consistent},
       PropertyId::strong_noninfluence},
  };
  return rules;
}

// Reference recursions, written exactly as defined and used as the oracle for
// the fast engine. sources(as, s, d) is the set of domains allowed to pass
// information to d, directly or transitively, while as runs from s; an event
// is kept by ipurge iff its domain is in that set. A purged event does not
// advance the purge state.
inline DomainSet sources(const Model& m, std::span<const Event> as, const State& s, int d) {
  if (as.empty()) return DomainSet(1) << d;
  int u = domain_of_event(s, as.front());
  DomainSet rest = sources(m, as.subspan(1), m.step(s, as.front()), d);
  for (int v = 0; v < m.cfg.n_domains(); ++v)
    if (((rest >> v) & 1u) && m.policy.allows(u, v)) return rest | (DomainSet(1) << u);
  return rest;
}

inline std::vector<Event> ipurge(const Model& m, std::span<const Event> as, const State& s,
                                 int d) {
  if (as.empty()) return {};
  int u = domain_of_event(s, as.front());
  if ((sources(m, as, s, d) >> u) & 1u) {
    std::vector<Event> out{as.front()};
    auto rest = ipurge(m, as.subspan(1), m.step(s, as.front()), d);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  }
  return ipurge(m, as.subspan(1), s, d);
}

// s after as and t after bs look the same to d.
inline bool obs_equiv(const Model& m, const State& s, std::span<const Event> as, const State& t,
                      std::span<const Event> bs, int d) {
  return vpeq(m.cfg, m.tx_view, d, m.run(s, as), m.run(t, bs));
}

// Event domains depend on the state only through `current`, and only
// Schedule events (domain: scheduler, never purged) move `current`. The
// engine exploits this: these current-indexed twins of sources/ipurge agree
// with the state-based recursions above on every input, which the test suite
// asserts.
inline int current_after(const Event& e, int cur) {
  return e.kind == EventKind::schedule ? e.arg : cur;
}

inline DomainSet sources_cur(const Model& m, std::span<const Event> as, int cur, int d) {
  if (as.empty()) return DomainSet(1) << d;
  int u = domain_of_event_cur(cur, as.front());
  DomainSet rest = sources_cur(m, as.subspan(1), current_after(as.front(), cur), d);
  for (int v = 0; v < m.cfg.n_domains(); ++v)
    if (((rest >> v) & 1u) && m.policy.allows(u, v)) return rest | (DomainSet(1) << u);
  return rest;
}

// Keep-mask form: bit i set iff as[i] survives the purge.
inline uint64_t ipurge_mask_cur(const Model& m, std::span<const Event> as, int cur, int d) {
  if (as.empty()) return 0;
  int u = domain_of_event_cur(cur, as.front());
  if ((sources_cur(m, as, cur, d) >> u) & 1u)
    return 1u | (ipurge_mask_cur(m, as.subspan(1), current_after(as.front(), cur), d) << 1);
  return ipurge_mask_cur(m, as.subspan(1), cur, d) << 1;
}

inline std::vector<Event> ipurge_cur(const Model& m, std::span<const Event> as, int cur, int d) {
  uint64_t mask = ipurge_mask_cur(m, as, cur, d);
  std::vector<Event> out;
  for (size_t i = 0; i < as.size(); ++i)
    if ((mask >> i) & 1u) out.push_back(as[i]);
  return out;
}

} // namespace skiff
