#pragma once

#include "skiff/reach.hpp"
#include "skiff/witness.hpp"

namespace skiff {

struct SequenceBudgetExceeded : std::runtime_error {
  SequenceBudgetExceeded(uint64_t need, uint64_t budget)
      : std::runtime_error("sequence budget exceeded: level needs " + std::to_string(need) +
                           " sequences, budget " + std::to_string(budget)) {}
};

struct BoundedOptions {
  int bound = 2;
  uint64_t seq_budget = 2'000'000; // total sequence-tree nodes across all levels
  uint8_t property_mask = 0x7f;    // bits index the first seven PropertyIds
  bool minimize_witnesses = true;
};

struct PropertyRun {
  std::vector<Verdict> verdicts; // the seven bounded properties, in PropertyId order
  uint64_t sequences = 0;
  uint64_t state_checks = 0;
  uint64_t pairs = 0;

  const Verdict& operator[](PropertyId p) const { return verdicts[(int)p]; }
};

// Bounded exhaustive check of the seven trace properties over all event
// sequences of length <= bound, quantifying start states over the full
// reachable set (the _r and pair properties) or the initial state alone.
//
// The engine leans on three facts about this model, each asserted against
// the literal recursions by the test suite:
//   1. domain_of_event reads only `current`, and only never-purged Schedule
//      events move `current`, so sources/ipurge are functions of the
//      scheduler view class, not the whole state.
//   2. ipurge is idempotent, and sources(as) = sources(ipurge(as)), so the
//      purged sequence can serve as the anchor of its equivalence class:
//      run-views equal their anchor run-views, plus anchor runs agreeing
//      within scheduler+sources-equivalent groups, is exactly
//      strong_noninfluence (and, pairing arbitrary equal-purge sequences
//      through the anchor, noninfluence).
//   3. The scheduler observer cannot be violated (its view is `current`,
//      which purging never perturbs), so observers range over the
//      transmitter and the partitions.
//
// Verdicts are found in (sequence length, alphabet order, class, state)
// order, so the first witness per property is deterministic and of minimal
// sequence length; fail_length records that length.
inline PropertyRun check_bounded_properties(const Model& m, const ReachableSet& rs,
                                            const ViewTable& vt, const BoundedOptions& opt) {
  PropertyRun run;
  run.verdicts.resize(k_bounded_properties);
  for (int i = 0; i < k_bounded_properties; ++i) {
    run.verdicts[i].property = (PropertyId)i;
    run.verdicts[i].bound = opt.bound;
  }
  auto unresolved = [&](PropertyId p) {
    return ((opt.property_mask >> (int)p) & 1) && run.verdicts[(int)p].holds;
  };
  auto any_unresolved = [&] {
    for (int i = 0; i < k_bounded_properties; ++i)
      if (unresolved((PropertyId)i)) return true;
    return false;
  };

  const int n = rs.size();
  const int nd = m.cfg.n_domains();
  const int n_events = (int)m.alphabet.size();
  const auto& class_of = vt.view_id[k_scheduler];
  const int n_classes = vt.n_views[k_scheduler];

  std::vector<std::vector<int32_t>> states_by_class(n_classes);
  for (int si = 0; si < n; ++si) states_by_class[class_of[si]].push_back(si);
  std::vector<int16_t> class_cur(n_classes, -1);
  for (int si = 0; si < n; ++si) class_cur[class_of[si]] = rs.states[si].current;

  bool per_state =
      unresolved(PropertyId::noninterference_r) || unresolved(PropertyId::weak_noninterference_r) ||
      unresolved(PropertyId::nonleakage) || unresolved(PropertyId::noninfluence) ||
      unresolved(PropertyId::strong_noninfluence);

  // Group ids per sources set: states with one id agree on every domain the
  // set names. Cached per set across the whole run.
  struct Groups {
    std::vector<int32_t> gid;
    int32_t count = 0;
  };
  std::unordered_map<DomainSet, Groups> group_cache;
  auto groups_for = [&](DomainSet s) -> const Groups& {
    auto it = group_cache.find(s);
    if (it != group_cache.end()) return it->second;
    Groups g;
    g.gid.resize(n);
    std::unordered_map<std::string, int32_t> intern;
    std::string key;
    for (int si = 0; si < n; ++si) {
      key.clear();
      for (int v = 0; v < nd; ++v)
        if ((s >> v) & 1u) {
          int32_t id = vt.view_id[v][si];
          key.append((const char*)&id, sizeof(id));
        }
      g.gid[si] = intern.try_emplace(key, (int32_t)intern.size()).first->second;
    }
    g.count = (int32_t)intern.size();
    return group_cache.emplace(s, std::move(g)).first->second;
  };

  // Stamped scratch for group-constancy scans: no clearing between scans.
  std::vector<uint32_t> stamp(n, 0);
  std::vector<int32_t> first_val(n), first_si(n);
  uint32_t version = 0;

  std::vector<Event> seq;
  std::vector<std::vector<int32_t>> fstack(opt.bound + 1);
  fstack[0].resize(n);
  for (int si = 0; si < n; ++si) fstack[0][si] = si;
  for (int lvl = 1; lvl <= opt.bound; ++lvl) fstack[lvl].resize(n);

  // Index of an alphabet event (purged sequences reuse alphabet storage via
  // indices so successor columns can be used to run them).
  std::unordered_map<std::string, int> alpha_index;
  {
    std::string k;
    for (int ei = 0; ei < n_events; ++ei) {
      k.clear();
      k.push_back((char)m.alphabet[ei].kind);
      k.append((const char*)&m.alphabet[ei].arg, 2);
      k.append((const char*)&m.alphabet[ei].msg, 2);
      alpha_index.emplace(k, ei);
    }
  }
  auto event_index = [&](const Event& e) {
    std::string k;
    k.push_back((char)e.kind);
    k.append((const char*)&e.arg, 2);
    k.append((const char*)&e.msg, 2);
    return alpha_index.at(k);
  };

  auto run_purged = [&](int si, const std::vector<int>& p_idx) {
    for (int ei : p_idx) si = rs.succ(si, ei);
    return si;
  };

  auto fail = [&](PropertyId p, int length, Counterexample c) {
    Verdict& v = run.verdicts[(int)p];
    if (!v.holds) return;
    v.holds = false;
    v.fail_length = length;
    c.property = p;
    c.diff = render_witness_diff(m, c);
    v.witness = std::move(c);
  };

  auto prefix_plus = [&](int si, std::span<const Event> tail, int* split) {
    std::vector<Event> out = rs.path_to(m, si);
    *split = (int)out.size();
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
  };

  // One sequence, all properties, all observers.
  auto check_node = [&](int length) {
    run.sequences++;
    const auto& f = fstack[length];
    for (int d = k_transmitter; d < nd; ++d) {
      bool want_nir = unresolved(PropertyId::noninterference_r);
      bool want_wnir = unresolved(PropertyId::weak_noninterference_r);
      bool want_ni = unresolved(PropertyId::noninterference);
      bool want_wn = unresolved(PropertyId::weak_noninterference);
      bool want_nl = unresolved(PropertyId::nonleakage);
      bool want_inf = unresolved(PropertyId::noninfluence);
      bool want_str = unresolved(PropertyId::strong_noninfluence);
      if (!(want_nir || want_wnir || want_ni || want_wn || want_nl || want_inf || want_str))
        continue;
      const auto& vd = vt.view_id[d];
      for (int c = 0; c < n_classes; ++c) {
        if (class_cur[c] < 0) continue;
        bool has_s0 = class_of[0] == c;
        uint64_t keep = ipurge_mask_cur(m, seq, class_cur[c], d);
        bool selfpure = keep == (length ? (uint64_t(1) << length) - 1 : 0);
        std::vector<int> p_idx;
        if (!selfpure)
          for (int i = 0; i < length; ++i)
            if ((keep >> i) & 1u) p_idx.push_back(event_index(seq[i]));

        // Anchor comparison: the run of as must look like the run of its
        // purge, from s0 (noninterference) and from every state (the _r
        // and influence properties).
        if (!selfpure && (want_ni || want_wn) && has_s0) {
          int a0 = run_purged(0, p_idx);
          if (vd[f[0]] != vd[a0]) {
            std::vector<Event> purged;
            for (int ei : p_idx) purged.push_back(m.alphabet[ei]);
            Counterexample c0;
            c0.observer = d;
            c0.prefix_a = seq;
            c0.prefix_b = purged;
            if (want_ni) fail(PropertyId::noninterference, length, c0);
            if (want_wn) fail(PropertyId::weak_noninterference, length, c0);
          }
        }
        if (!selfpure && per_state && (want_nir || want_wnir || want_inf || want_str)) {
          for (int32_t si : states_by_class[c]) {
            run.state_checks++;
            int ai = run_purged(si, p_idx);
            if (vd[f[si]] == vd[ai]) continue;
            std::vector<Event> purged;
            for (int ei : p_idx) purged.push_back(m.alphabet[ei]);
            Counterexample c0;
            c0.observer = d;
            c0.prefix_a = prefix_plus(si, seq, &c0.split_a);
            c0.prefix_b = prefix_plus(si, purged, &c0.split_b);
            if (want_nir) fail(PropertyId::noninterference_r, length, c0);
            if (want_wnir) fail(PropertyId::weak_noninterference_r, length, c0);
            if (want_inf) fail(PropertyId::noninfluence, length, c0);
            if (want_str) fail(PropertyId::strong_noninfluence, length, c0);
            break;
          }
          want_nir = unresolved(PropertyId::noninterference_r);
          want_wnir = unresolved(PropertyId::weak_noninterference_r);
          want_inf = unresolved(PropertyId::noninfluence);
          want_str = unresolved(PropertyId::strong_noninfluence);
        }

        // Group constancy: scheduler+sources-equivalent states must agree on
        // the observer's view of the final state. At self-purged sequences
        // this is also the anchor-vs-anchor half of the influence properties.
        bool infl_here = selfpure && (want_inf || want_str);
        if (per_state && (want_nl || infl_here)) {
          DomainSet s = sources_cur(m, seq, class_cur[c], d);
          const Groups& g = groups_for(s);
          ++version;
          for (int32_t si : states_by_class[c]) {
            run.state_checks++;
            int32_t gid = g.gid[si];
            if (stamp[gid] != version) {
              stamp[gid] = version;
              first_val[gid] = vd[f[si]];
              first_si[gid] = si;
              continue;
            }
            run.pairs++;
            if (first_val[gid] == vd[f[si]]) continue;
            Counterexample c0;
            c0.observer = d;
            c0.prefix_a = prefix_plus(first_si[gid], seq, &c0.split_a);
            c0.prefix_b = prefix_plus(si, seq, &c0.split_b);
            if (want_nl) fail(PropertyId::nonleakage, length, c0);
            if (infl_here) {
              if (want_inf) fail(PropertyId::noninfluence, length, c0);
              if (want_str) fail(PropertyId::strong_noninfluence, length, c0);
            }
            break;
          }
        }
      }
    }
  };

  // Level-ordered walk: all sequences of length exactly `lvl`, extending a
  // shared successor-function stack, alphabet order at every depth.
  uint64_t budget_used = 0;
  for (int lvl = 0; lvl <= opt.bound && any_unresolved(); ++lvl) {
    uint64_t level_nodes = 1;
    for (int i = 0; i < lvl; ++i) {
      if (level_nodes > opt.seq_budget / (n_events ? n_events : 1) + 1)
        throw SequenceBudgetExceeded(budget_used + level_nodes * n_events, opt.seq_budget);
      level_nodes *= n_events;
    }
    if (budget_used + level_nodes > opt.seq_budget)
      throw SequenceBudgetExceeded(budget_used + level_nodes, opt.seq_budget);
    budget_used += level_nodes;

    auto walk = [&](auto&& self, int depth) -> void {
      if (!any_unresolved()) return;
      if (depth == lvl) {
        check_node(lvl);
        return;
      }
      const auto& cur = fstack[depth];
      auto& nxt = fstack[depth + 1];
      for (int ei = 0; ei < n_events; ++ei) {
        seq.push_back(m.alphabet[ei]);
        const int32_t* col = rs.edges.data() + ei;
        for (int si = 0; si < n; ++si) nxt[si] = col[(size_t)cur[si] * n_events];
        self(self, depth + 1);
        seq.pop_back();
      }
    };
    walk(walk, 0);
  }

  if (opt.minimize_witnesses)
    for (auto& v : run.verdicts)
      if (v.witness) v.witness = minimize(m, *v.witness);
  return run;
}

} // namespace skiff
