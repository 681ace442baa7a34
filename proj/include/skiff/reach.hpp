#pragma once

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "skiff/model.hpp"

namespace skiff {

struct BudgetExceeded : std::runtime_error {
  size_t states_found;
  size_t frontier_size;
  BudgetExceeded(size_t found, size_t frontier)
      : std::runtime_error("state budget exceeded: " + std::to_string(found) +
                           " states found, frontier " + std::to_string(frontier)),
        states_found(found),
        frontier_size(frontier) {}
};

// Breadth-first closure of the initial state under the model's alphabet.
// State ids follow discovery order, so two runs are identical. edges is a
// dense (state, alphabet index) -> state table; parent/parent_event form the
// BFS tree used to print shortest event paths from s0.
struct ReachableSet {
  std::vector<State> states;
  std::vector<int32_t> edges;
  std::vector<int32_t> parent;
  std::vector<int32_t> parent_event;
  int n_events = 0;

  int size() const { return (int)states.size(); }
  int succ(int si, int ei) const { return edges[(size_t)si * n_events + ei]; }

  std::vector<Event> path_to(const Model& m, int si) const {
    std::vector<Event> out;
    for (int i = si; parent[i] >= 0; i = parent[i]) out.push_back(m.alphabet[parent_event[i]]);
    std::reverse(out.begin(), out.end());
    return out;
  }
};

inline ReachableSet explore(const Model& m, size_t budget = 200000) {
  ReachableSet rs;
  rs.n_events = (int)m.alphabet.size();
  std::unordered_map<std::string, int32_t> index;
  std::string key;

  auto intern = [&](const State& s) -> std::pair<int32_t, bool> {
    serialize_state(s, key);
    auto [it, fresh] = index.try_emplace(key, (int32_t)rs.states.size());
    if (fresh) rs.states.push_back(s);
    return {it->second, fresh};
  };

  intern(m.s0);
  rs.parent.push_back(-1);
  rs.parent_event.push_back(-1);
  size_t next = 0;
  while (next < rs.states.size()) {
    if (rs.states.size() > budget) throw BudgetExceeded(rs.states.size(), rs.states.size() - next);
    int32_t si = (int32_t)next++;
    for (int ei = 0; ei < rs.n_events; ++ei) {
      State t = m.step(rs.states[si], m.alphabet[ei]);
      auto [ti, fresh] = intern(t);
      if (fresh) {
        rs.parent.push_back(si);
        rs.parent_event.push_back(ei);
      }
      rs.edges.push_back(ti);
    }
  }
  return rs;
}

// Distinct observations per domain. view_id[d][si] indexes into an interned
// set of view byte strings; states with equal ids are indistinguishable for d.
struct ViewTable {
  std::vector<std::vector<int32_t>> view_id;
  std::vector<int32_t> n_views;
};

inline ViewTable build_view_table(const Model& m, const ReachableSet& rs) {
  ViewTable vt;
  int nd = m.cfg.n_domains();
  vt.view_id.assign(nd, {});
  vt.n_views.assign(nd, 0);
  std::string key;
  for (int d = 0; d < nd; ++d) {
    auto& col = vt.view_id[d];
    col.resize(rs.size());
    std::unordered_map<std::string, int32_t> index;
    for (int si = 0; si < rs.size(); ++si) {
      key.clear();
      view_bytes(m.cfg, m.tx_view, d, rs.states[si], key);
      auto [it, fresh] = index.try_emplace(key, (int32_t)index.size());
      col[si] = it->second;
    }
    vt.n_views[d] = (int32_t)index.size();
  }
  return vt;
}

// Structural well-formedness of a single state. Empty result means sound:
// the id bindings are a bijection between created ports and live slots, dead
// slots are empty, buffers respect capacities, and the bookkeeping vectors
// match the configuration.
inline std::vector<std::string> state_invariant_violations(const SysConfig& cfg, const State& s) {
  std::vector<std::string> out;
  if (!(is_partition_domain(s.current) || s.current == k_transmitter))
    out.push_back("current is not a partition or the transmitter");
  if ((int)s.part_mode.size() != cfg.n_partitions()) out.push_back("part_mode size mismatch");
  if ((int)s.locals.size() != cfg.n_domains()) out.push_back("locals missing a domain");
  if ((int)s.comm.cfg_port.size() != cfg.n_ports() || (int)s.comm.ports.size() != cfg.n_ports() ||
      (int)s.comm.id_of_port.size() != cfg.n_ports()) {
    out.push_back("comm vector size mismatch");
    return out;
  }
  for (int slot = 0; slot < cfg.n_ports(); ++slot) {
    int pc = s.comm.cfg_port[slot];
    if (pc < 0) {
      if (!s.comm.ports[slot].buf.empty())
        out.push_back("unbound slot " + std::to_string(slot + 1) + " holds messages");
      continue;
    }
    if (pc >= cfg.n_ports()) {
      out.push_back("slot " + std::to_string(slot + 1) + " bound to unknown port");
      continue;
    }
    if (s.comm.id_of_port[pc] != slot + 1)
      out.push_back("port " + cfg.ports[pc].name + " id binding is not mutual");
    int cap = cfg.ports[pc].capacity;
    if ((int)s.comm.ports[slot].buf.size() > cap)
      out.push_back("port " + cfg.ports[pc].name + " exceeds capacity");
    for (int8_t b : s.comm.ports[slot].buf)
      if (b < 0 || b >= cfg.message_alphabet_size)
        out.push_back("port " + cfg.ports[pc].name + " holds an unknown message");
  }
  for (int p = 0; p < cfg.n_ports(); ++p) {
    int id = s.comm.id_of_port[p];
    if (id < 0 || id > cfg.n_ports()) {
      out.push_back("port " + cfg.ports[p].name + " has an out-of-range id");
    } else if (id != 0 && s.comm.cfg_port[id - 1] != p) {
      out.push_back("port " + cfg.ports[p].name + " claims a slot bound elsewhere");
    }
  }
  return out;
}

struct InvariantReport {
  bool ok = true;
  int checked = 0;
  int failed_state = -1;
  std::string first_violation;
};

inline InvariantReport check_invariants(const Model& m, const ReachableSet& rs) {
  InvariantReport rep;
  rep.checked = rs.size();
  for (int si = 0; si < rs.size(); ++si) {
    auto v = state_invariant_violations(m.cfg, rs.states[si]);
    if (!v.empty()) {
      rep.ok = false;
      rep.failed_state = si;
      rep.first_violation = v.front();
      return rep;
    }
  }
  return rep;
}

} // namespace skiff
