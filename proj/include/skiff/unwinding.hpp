#pragma once

#include "skiff/reach.hpp"
#include "skiff/witness.hpp"

namespace skiff {

struct KindUnwinding {
  uint64_t lr_instances = 0;  // (state, event, observer) triples with dom independent of observer
  uint64_t wsc_pairs = 0;     // state pairs satisfying all four antecedents
  uint64_t lr_violations = 0;
  uint64_t wsc_violations = 0;
};

struct UnwindingReport {
  bool lr_ok = true;
  bool wsc_ok = true;
  std::array<KindUnwinding, k_event_kinds> by_kind{};
  uint64_t pairs = 0;
  std::optional<Counterexample> lr_witness;  // first in (event, state, observer) order
  std::optional<Counterexample> wsc_witness; // first in (event, observer, state) order

  Verdict lr_verdict() const {
    Verdict v;
    v.property = PropertyId::local_respect;
    v.holds = lr_ok;
    if (!lr_ok) {
      v.fail_length = (int)lr_witness->total_events();
      v.witness = lr_witness;
    }
    return v;
  }
  Verdict wsc_verdict() const {
    Verdict v;
    v.property = PropertyId::weak_step_consistent;
    v.holds = wsc_ok;
    if (!wsc_ok) {
      v.fail_length = (int)wsc_witness->total_events();
      v.witness = wsc_witness;
    }
    return v;
  }
};

// Checks both unwinding conditions at every reachable state.
//
// Local respect: an event whose domain may not flow to the observer leaves
// the observer's view unchanged. Checked directly per (event, state,
// observer).
//
// Weak step consistency: two states giving equal views to the scheduler,
// the observer and the event's domain (which must flow to the observer)
// step to states giving equal views to the observer. States agreeing on
// those three views form buckets; the observer's view of the successor
// must be constant per bucket. Bucket membership is exactly the antecedent
// because equal scheduler views pin `current` and therefore the event's
// domain.
inline UnwindingReport verify_unwinding(const Model& m, const ReachableSet& rs,
                                        const ViewTable& vt, bool minimize_witnesses = true) {
  UnwindingReport rep;
  const int n = rs.size();
  const int nd = m.cfg.n_domains();
  const int n_events = (int)m.alphabet.size();

  std::vector<int16_t> cur_of(n);
  for (int si = 0; si < n; ++si) cur_of[si] = rs.states[si].current;

  auto make_lr = [&](int si, int ei, int d) {
    Counterexample c;
    c.property = PropertyId::local_respect;
    c.observer = d;
    c.prefix_a = rs.path_to(m, si);
    c.split_a = (int)c.prefix_a.size();
    c.prefix_b = c.prefix_a;
    c.split_b = c.split_a;
    c.event = m.alphabet[ei];
    c.diff = render_witness_diff(m, c);
    return c;
  };
  auto make_wsc = [&](int sa, int sb, int ei, int d) {
    Counterexample c;
    c.property = PropertyId::weak_step_consistent;
    c.observer = d;
    c.prefix_a = rs.path_to(m, sa);
    c.split_a = (int)c.prefix_a.size();
    c.prefix_b = rs.path_to(m, sb);
    c.split_b = (int)c.prefix_b.size();
    c.event = m.alphabet[ei];
    c.diff = render_witness_diff(m, c);
    return c;
  };

  // Local respect, direct scan.
  for (int ei = 0; ei < n_events; ++ei) {
    KindUnwinding& k = rep.by_kind[(int)m.alphabet[ei].kind];
    for (int si = 0; si < n; ++si) {
      int u = domain_of_event_cur(cur_of[si], m.alphabet[ei]);
      int ti = rs.succ(si, ei);
      for (int d = 0; d < nd; ++d) {
        if (m.policy.allows(u, d)) continue;
        k.lr_instances++;
        if (vt.view_id[d][si] == vt.view_id[d][ti]) continue;
        k.lr_violations++;
        rep.lr_ok = false;
        if (!rep.lr_witness) rep.lr_witness = make_lr(si, ei, d);
      }
    }
  }

  // Weak step consistency, bucketed scan. Key packs the three view ids.
  struct Bucket {
    int32_t succ_view;
    int32_t first_state;
    uint32_t size;
  };
  std::unordered_map<uint64_t, Bucket> buckets;
  for (int ei = 0; ei < n_events; ++ei) {
    KindUnwinding& k = rep.by_kind[(int)m.alphabet[ei].kind];
    for (int d = 0; d < nd; ++d) {
      buckets.clear();
      for (int si = 0; si < n; ++si) {
        int u = domain_of_event_cur(cur_of[si], m.alphabet[ei]);
        if (!m.policy.allows(u, d)) continue;
        uint64_t key = ((uint64_t)vt.view_id[k_scheduler][si] << 42) |
                       ((uint64_t)vt.view_id[d][si] << 21) | (uint64_t)vt.view_id[u][si];
        int32_t sv = vt.view_id[d][rs.succ(si, ei)];
        auto [it, fresh] = buckets.try_emplace(key, Bucket{sv, si, 1});
        if (fresh) continue;
        k.wsc_pairs += it->second.size;
        rep.pairs += it->second.size;
        it->second.size++;
        if (it->second.succ_view == sv) continue;
        k.wsc_violations++;
        rep.wsc_ok = false;
        if (!rep.wsc_witness) rep.wsc_witness = make_wsc(it->second.first_state, si, ei, d);
      }
    }
  }

  if (minimize_witnesses) {
    if (rep.lr_witness) rep.lr_witness = minimize(m, *rep.lr_witness);
    if (rep.wsc_witness) rep.wsc_witness = minimize(m, *rep.wsc_witness);
  }
  return rep;
}

} // namespace skiff
