#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

#include "skiff/properties.hpp"
#include "skiff/security.hpp"
#include "skiff/witness.hpp"

using namespace skiff;

namespace {

SysConfig load(const std::string& name) {
  const char* d = std::getenv("SKIFF_CONFIG_DIR");
  REQUIRE(d != nullptr);
  std::ifstream in(std::string(d) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

DomainSet dset(std::initializer_list<int> ds) {
  DomainSet s = 0;
  for (int d : ds) s |= DomainSet(1) << d;
  return s;
}

std::vector<Event> trace(const Model& m, const std::string& text) {
  return parse_trace(m.cfg, text);
}

Model restricted_model(const SysConfig& cfg, SemanticsVariant v,
                       const std::vector<std::string>& events) {
  Model m = make_model(cfg, v);
  m.alphabet.clear();
  for (const auto& t : events) m.alphabet.push_back(parse_event(m.cfg, t));
  return m;
}

const std::vector<std::string> k_focus_alphabet = {
    "Send_Queuing_Message(qs, m0)", "Send_Queuing_Message(qs, m1)", "Schedule(Transmitter)",
    "Schedule(P1)", "Transfer_Queuing_Message(C)"};

} // namespace

TEST_CASE("property names round trip and stay frozen") {
  const char* want[] = {"noninterference",        "weak_noninterference", "noninterference_r",
                        "weak_noninterference_r", "nonleakage",           "noninfluence",
                        "strong_noninfluence",    "local_respect",        "weak_step_consistent"};
  for (int i = 0; i < k_properties; ++i) {
    CHECK(property_name((PropertyId)i) == std::string(want[i]));
    auto back = property_from_name(want[i]);
    REQUIRE(back.has_value());
    CHECK((int)*back == i);
  }
  CHECK_FALSE(property_from_name("nonsense").has_value());
  CHECK(k_bounded_properties == 7);
}

TEST_CASE("the implication lattice is exactly the six known arrows") {
  const auto& rules = property_implications();
  REQUIRE(rules.size() == 6);
  auto has = [&](std::vector<PropertyId> prem, PropertyId conc) {
    for (const auto& r : rules)
      if (r.premises == prem && r.conclusion == conc) return true;
    return false;
  };
  CHECK(has({PropertyId::strong_noninfluence}, PropertyId::noninfluence));
  CHECK(has({PropertyId::strong_noninfluence}, PropertyId::noninterference_r));
  CHECK(has({PropertyId::strong_noninfluence}, PropertyId::nonleakage));
  CHECK(has({PropertyId::noninterference_r}, PropertyId::noninterference));
  CHECK(has({PropertyId::noninterference}, PropertyId::weak_noninterference));
  CHECK(has({PropertyId::local_respect, PropertyId::weak_step_consistent},
            PropertyId::strong_noninfluence));
}

TEST_CASE("sources and purge on pinned sequences") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  const State& s0 = m.s0;
  int P1 = 2, P2 = 3, TX = k_transmitter, SCH = k_scheduler;

  SECTION("the empty sequence can only come from the observer") {
    for (int d = 0; d < 4; ++d) {
      CHECK(sources(m, {}, s0, d) == dset({d}));
      CHECK(ipurge(m, {}, s0, d).empty());
    }
  }

  SECTION("domains are judged in the state the prefix has reached") {
    auto as = trace(m, "Schedule(P2); Send_Queuing_Message(qs, m0)");
    // The send runs after the switch, so it is P2's event, not P1's.
    CHECK(sources(m, as, s0, P2) == dset({SCH, P2}));
    CHECK(ipurge(m, as, s0, P2) == as);

    CHECK(sources(m, as, s0, P1) == dset({SCH, P1}));
    auto purged = ipurge(m, as, s0, P1);
    REQUIRE(purged.size() == 1);
    CHECK(purged[0].kind == EventKind::schedule);
  }

  SECTION("a send can reach the receiver through the transmitter") {
    auto as = trace(m, "Send_Queuing_Message(qs, m0); Schedule(Transmitter); "
                       "Transfer_Queuing_Message(C)");
    CHECK(sources(m, as, s0, P2) == dset({SCH, TX, P1, P2}));
    CHECK(ipurge(m, as, s0, P2) == as);

    CHECK(sources(m, as, s0, TX) == dset({SCH, TX, P1}));
    CHECK(ipurge(m, as, s0, TX) == as);

    // The transfer cannot reach P1, so it is dropped from P1's telling.
    CHECK(sources(m, as, s0, P1) == dset({SCH, P1}));
    auto purged = ipurge(m, as, s0, P1);
    REQUIRE(purged.size() == 2);
    CHECK(purged[0].kind == EventKind::send_queuing_message);
    CHECK(purged[1].kind == EventKind::schedule);
  }

  SECTION("a receive by the destination owner cannot reach the transmitter") {
    State s = m.run(s0, trace(m, "Schedule(P2)"));
    auto as = trace(m, "Receive_Queuing_Message(qd)");
    CHECK(sources(m, as, s, TX) == dset({TX}));
    CHECK(ipurge(m, as, s, TX).empty());
    CHECK(sources(m, as, s, P2) == dset({P2}));
    CHECK(ipurge(m, as, s, P2) == as);
  }
}

TEST_CASE("purging is idempotent, keeps its sources, and matches the class form") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  ReachableSet rs = explore(m);
  std::mt19937 rng(19);
  for (int trial = 0; trial < 2000; ++trial) {
    const State& s = rs.states[rng() % rs.size()];
    std::vector<Event> as;
    int len = (int)(rng() % 5);
    for (int i = 0; i < len; ++i) as.push_back(m.alphabet[rng() % m.alphabet.size()]);
    int d = (int)(rng() % m.cfg.n_domains());

    auto p = ipurge(m, as, s, d);
    CHECK(ipurge(m, p, s, d) == p);
    CHECK(sources(m, p, s, d) == sources(m, as, s, d));

    // The class forms agree with the literal state recursions.
    CHECK(sources_cur(m, as, s.current, d) == sources(m, as, s, d));
    CHECK(ipurge_cur(m, as, s.current, d) == p);
    uint64_t mask = ipurge_mask_cur(m, as, s.current, d);
    std::vector<Event> from_mask;
    for (int i = 0; i < (int)as.size(); ++i)
      if ((mask >> i) & 1u) from_mask.push_back(as[i]);
    CHECK(from_mask == p);

    // Schedules are never dropped.
    for (const auto& e : as)
      if (e.kind == EventKind::schedule) {
        bool found = false;
        for (const auto& k : p) found |= k == e;
        CHECK(found);
        break;
      }
  }
}

// A literal transcription of the seven trace properties, quantified exactly
// as their definitions read: over every start state, every observer
// including the scheduler, and every sequence up to the bound. It shares
// only sources/ipurge/vpeq with the engine under test; classes, groups and
// run tables are rebuilt here from those primitives.
namespace brute {

struct Tables {
  const Model& m;
  std::vector<State> states;
  int ns = 0, nd = 0, nq = 0, s0i = -1;

  std::vector<std::vector<Event>> seqs; // all sequences, grouped by rising length
  std::vector<int> level_end;           // seqs[0, level_end[L]) have length <= L
  std::vector<int> run_to;              // [q * ns + si] resulting state index
  std::vector<std::vector<int>> dv;     // [d][si] view class, interned via vpeq
  std::vector<int> purge_of;            // [(d * ns + si) * nq + q] purge as a seq index
  std::vector<DomainSet> src_of;        // same indexing
  std::unordered_map<DomainSet, std::vector<int>> group_cache;

  int run(int q, int si) const { return run_to[(size_t)q * ns + si]; }
  int purge(int d, int si, int q) const { return purge_of[((size_t)d * ns + si) * nq + q]; }
  DomainSet src(int d, int si, int q) const { return src_of[((size_t)d * ns + si) * nq + q]; }
  bool veq(int d, int a, int b) const { return dv[d][a] == dv[d][b]; }

  const std::vector<int>& groups(DomainSet set) {
    auto it = group_cache.find(set);
    if (it != group_cache.end()) return it->second;
    std::vector<int> gid(ns);
    std::map<std::vector<int>, int> seen;
    std::vector<int> key;
    for (int si = 0; si < ns; ++si) {
      key.clear();
      for (int d = 0; d < nd; ++d)
        if ((set >> d) & 1) key.push_back(dv[d][si]);
      gid[si] = (int)seen.emplace(key, (int)seen.size()).first->second;
    }
    return group_cache.emplace(set, std::move(gid)).first->second;
  }
};

inline Tables make_tables(const Model& m, const ReachableSet& rs, int bound) {
  Tables t{m, rs.states};
  t.ns = rs.size();
  t.nd = m.cfg.n_domains();

  std::unordered_map<std::string, int> state_index;
  for (int i = 0; i < t.ns; ++i) state_index[serialize_state(rs.states[i])] = i;
  auto index_of = [&](const State& s) {
    auto it = state_index.find(serialize_state(s));
    REQUIRE(it != state_index.end());
    return it->second;
  };
  t.s0i = index_of(m.s0);

  auto alpha_of = [&](const Event& e) {
    for (int i = 0; i < (int)m.alphabet.size(); ++i)
      if (m.alphabet[i] == e) return i;
    FAIL("event outside the alphabet");
    return -1;
  };
  std::unordered_map<std::string, int> seq_index;
  auto key_of = [&](const std::vector<Event>& q) {
    std::string k;
    for (const Event& e : q) k.push_back((char)('a' + alpha_of(e)));
    return k;
  };

  t.seqs.push_back({});
  t.level_end.push_back(1);
  size_t lo = 0;
  for (int len = 1; len <= bound; ++len) {
    size_t hi = t.seqs.size();
    for (size_t i = lo; i < hi; ++i)
      for (const Event& e : m.alphabet) {
        auto s = t.seqs[i];
        s.push_back(e);
        t.seqs.push_back(std::move(s));
      }
    lo = hi;
    t.level_end.push_back((int)t.seqs.size());
  }
  t.nq = (int)t.seqs.size();
  for (int q = 0; q < t.nq; ++q) seq_index[key_of(t.seqs[q])] = q;

  t.run_to.resize((size_t)t.nq * t.ns);
  for (int q = 0; q < t.nq; ++q)
    for (int si = 0; si < t.ns; ++si)
      t.run_to[(size_t)q * t.ns + si] = index_of(m.run(rs.states[si], t.seqs[q]));

  t.dv.resize(t.nd);
  for (int d = 0; d < t.nd; ++d) {
    auto& id = t.dv[d];
    id.assign(t.ns, -1);
    std::vector<int> reps;
    for (int si = 0; si < t.ns; ++si) {
      for (int r = 0; r < (int)reps.size(); ++r)
        if (vpeq(m.cfg, m.tx_view, d, rs.states[si], rs.states[reps[r]])) {
          id[si] = r;
          break;
        }
      if (id[si] < 0) {
        id[si] = (int)reps.size();
        reps.push_back(si);
      }
    }
  }

  t.purge_of.resize((size_t)t.nd * t.ns * t.nq);
  t.src_of.resize((size_t)t.nd * t.ns * t.nq);
  for (int d = 0; d < t.nd; ++d)
    for (int si = 0; si < t.ns; ++si)
      for (int q = 0; q < t.nq; ++q) {
        size_t at = ((size_t)d * t.ns + si) * t.nq + q;
        t.src_of[at] = sources(m, t.seqs[q], rs.states[si], d);
        auto it = seq_index.find(key_of(ipurge(m, t.seqs[q], rs.states[si], d)));
        REQUIRE(it != seq_index.end());
        t.purge_of[at] = it->second;
      }
  return t;
}

struct Finding {
  bool holds = true;
  int fail_length = -1;
};

// True if some instance whose longer sequence has length exactly `len`
// violates the property.
inline bool level_violated(Tables& t, PropertyId prop, int len) {
  const int sched = k_scheduler;
  int q_lo = len == 0 ? 0 : t.level_end[len - 1];
  int q_hi = t.level_end[len];
  std::vector<std::vector<int>> sched_members;
  {
    int n_classes = 0;
    for (int si = 0; si < t.ns; ++si) n_classes = std::max(n_classes, t.dv[sched][si] + 1);
    sched_members.resize(n_classes);
    for (int si = 0; si < t.ns; ++si) sched_members[t.dv[sched][si]].push_back(si);
  }

  for (int d = 0; d < t.nd; ++d)
    for (int qa = q_lo; qa < q_hi; ++qa) {
      switch (prop) {
        case PropertyId::noninterference: {
          if (!t.veq(d, t.run(qa, t.s0i), t.run(t.purge(d, t.s0i, qa), t.s0i))) return true;
          break;
        }
        case PropertyId::weak_noninterference: {
          int pa = t.purge(d, t.s0i, qa);
          for (int qb = 0; qb < q_hi; ++qb)
            if (t.purge(d, t.s0i, qb) == pa && !t.veq(d, t.run(qa, t.s0i), t.run(qb, t.s0i)))
              return true;
          break;
        }
        case PropertyId::noninterference_r: {
          for (int si = 0; si < t.ns; ++si)
            if (!t.veq(d, t.run(qa, si), t.run(t.purge(d, si, qa), si))) return true;
          break;
        }
        case PropertyId::weak_noninterference_r: {
          for (int si = 0; si < t.ns; ++si) {
            int pa = t.purge(d, si, qa);
            for (int qb = 0; qb < q_hi; ++qb)
              if (t.purge(d, si, qb) == pa && !t.veq(d, t.run(qa, si), t.run(qb, si)))
                return true;
          }
          break;
        }
        case PropertyId::nonleakage: {
          for (int si = 0; si < t.ns; ++si) {
            const auto& gid = t.groups(t.src(d, si, qa));
            for (int ti : sched_members[t.dv[sched][si]])
              if (gid[ti] == gid[si] && !t.veq(d, t.run(qa, si), t.run(qa, ti))) return true;
          }
          break;
        }
        case PropertyId::noninfluence: {
          for (int si = 0; si < t.ns; ++si) {
            int pa = t.purge(d, si, qa);
            const auto& gid = t.groups(t.src(d, si, qa));
            for (int ti : sched_members[t.dv[sched][si]]) {
              if (gid[ti] != gid[si]) continue;
              for (int qb = 0; qb < q_hi; ++qb)
                if (t.purge(d, si, qb) == pa && !t.veq(d, t.run(qa, si), t.run(qb, ti)))
                  return true;
            }
          }
          break;
        }
        case PropertyId::strong_noninfluence: {
          for (int si = 0; si < t.ns; ++si) {
            const auto& gid = t.groups(t.src(d, si, qa));
            for (int ti : sched_members[t.dv[sched][si]])
              if (gid[ti] == gid[si] &&
                  !t.veq(d, t.run(qa, si), t.run(t.purge(d, ti, qa), ti)))
                return true;
          }
          break;
        }
        default:
          FAIL("not a bounded property");
      }
    }
  return false;
}

inline Finding check(Tables& t, PropertyId prop, int bound) {
  for (int len = 0; len <= bound; ++len)
    if (level_violated(t, prop, len)) return {false, len};
  return {};
}

} // namespace brute

TEST_CASE("the engine agrees with the literal definitions on a focused alphabet") {
  for (SemanticsVariant v : {SemanticsVariant::arinc, SemanticsVariant::fixed}) {
    CAPTURE(variant_name(v));
    Model m = restricted_model(load("cfg1.sk"), v, k_focus_alphabet);
    ReachableSet rs = explore(m);
    ViewTable vt = build_view_table(m, rs);

    const int bound = 2;
    brute::Tables tables = brute::make_tables(m, rs, bound);

    BoundedOptions opt;
    opt.bound = bound;
    opt.minimize_witnesses = false;
    PropertyRun run = check_bounded_properties(m, rs, vt, opt);

    for (int p = 0; p < k_bounded_properties; ++p) {
      brute::Finding want = brute::check(tables, (PropertyId)p, bound);
      CAPTURE(property_name((PropertyId)p));
      CHECK(run.verdicts[p].holds == want.holds);
      if (!want.holds) CHECK(run.verdicts[p].fail_length == want.fail_length);
    }
  }
}

TEST_CASE("every violation the engine reports replays, and verdicts respect the arrows") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  ReachableSet rs = explore(m);
  ViewTable vt = build_view_table(m, rs);
  BoundedOptions opt;
  opt.bound = 2;
  PropertyRun run = check_bounded_properties(m, rs, vt, opt);

  for (const auto& v : run.verdicts) {
    if (v.holds) continue;
    REQUIRE(v.witness.has_value());
    CAPTURE(property_name(v.property));
    ReplayOutcome out = replay(m, *v.witness);
    CAPTURE(out.reason);
    CHECK(out.reproduced);
    CHECK(v.fail_length >= 0);
    CHECK(v.fail_length <= opt.bound);
  }

  // At equal bound, a premise set that holds forces its conclusion. Rules
  // with unwinding premises are out of scope here.
  auto holds = [&](PropertyId p) { return run.verdicts[(int)p].holds; };
  for (const auto& rule : property_implications()) {
    bool bounded = (int)rule.conclusion < k_bounded_properties;
    bool premises = true;
    for (PropertyId p : rule.premises) {
      bounded &= (int)p < k_bounded_properties;
      if (bounded) premises &= holds(p);
    }
    if (bounded && premises) CHECK(holds(rule.conclusion));
  }
}

TEST_CASE("witnesses survive replay only in the semantics that produced them") {
  Model arinc = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  Model fixed = make_model(load("cfg1.sk"), SemanticsVariant::fixed);

  // Full source queue: the send status answers NOT_AVAILABLE under the
  // faithful semantics and NO_ERROR under the repaired one.
  Counterexample c;
  c.property = PropertyId::weak_step_consistent;
  c.observer = 2;
  c.prefix_a = trace(arinc, "Send_Queuing_Message(qs, m0); Create_Queuing_Port(qs)");
  c.split_a = 2;
  c.prefix_b = trace(arinc, "Create_Queuing_Port(qs)");
  c.split_b = 1;
  c.event = parse_event(arinc.cfg, "Send_Queuing_Message(qs, m1)");

  CHECK(replay(arinc, c).reproduced);
  CHECK_FALSE(replay(fixed, c).reproduced);

  SECTION("perturbing any ingredient breaks the antecedents or the difference") {
    Counterexample wrong = c;
    wrong.observer = 3; // the receiver sees neither send status
    CHECK_FALSE(replay(arinc, wrong).reproduced);

    wrong = c;
    wrong.event = parse_event(arinc.cfg, "Get_Queuing_Portstatus(qs)");
    CHECK_FALSE(replay(arinc, wrong).reproduced);

    wrong = c;
    wrong.prefix_b = c.prefix_a;
    wrong.split_b = c.split_a;
    CHECK_FALSE(replay(arinc, wrong).reproduced); // equal states, no disagreement

    wrong = c;
    wrong.property = PropertyId::local_respect; // the sender may influence itself
    CHECK_FALSE(replay(arinc, wrong).reproduced);
  }
}

TEST_CASE("minimization keeps witnesses replayable and is idempotent") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);

  Counterexample padded;
  padded.property = PropertyId::weak_step_consistent;
  padded.observer = 2;
  padded.prefix_a = trace(m, "Get_Queuing_Portstatus(qs); Send_Queuing_Message(qs, m0); "
                             "Schedule(P2); Schedule(P1); Create_Queuing_Port(qs)");
  padded.split_a = 5;
  padded.prefix_b = trace(m, "Schedule(P2); Schedule(P1); Create_Queuing_Port(qs)");
  padded.split_b = 3;
  padded.event = parse_event(m.cfg, "Send_Queuing_Message(qs, m1)");
  REQUIRE(replay(m, padded).reproduced);

  Counterexample small = minimize(m, padded);
  CHECK(replay(m, small).reproduced);
  CHECK(small.total_events() <= padded.total_events());
  CHECK(small.total_events() <= 4); // the known minimal form

  Counterexample again = minimize(m, small);
  CHECK(again.total_events() == small.total_events());
}

TEST_CASE("bounded verdicts come with the first failing length") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  ReachableSet rs = explore(m);
  ViewTable vt = build_view_table(m, rs);
  BoundedOptions opt;
  opt.bound = 3;
  PropertyRun run = check_bounded_properties(m, rs, vt, opt);

  CHECK(run[PropertyId::noninterference].holds);
  CHECK(run[PropertyId::weak_noninterference].holds);
  CHECK_FALSE(run[PropertyId::noninterference_r].holds);
  CHECK(run[PropertyId::noninterference_r].fail_length == 3);
  CHECK_FALSE(run[PropertyId::weak_noninterference_r].holds);
  CHECK(run[PropertyId::weak_noninterference_r].fail_length == 3);
  CHECK_FALSE(run[PropertyId::nonleakage].holds);
  CHECK(run[PropertyId::nonleakage].fail_length == 1);
  CHECK_FALSE(run[PropertyId::noninfluence].holds);
  CHECK(run[PropertyId::noninfluence].fail_length == 1);
  CHECK_FALSE(run[PropertyId::strong_noninfluence].holds);
  CHECK(run[PropertyId::strong_noninfluence].fail_length == 1);
}

TEST_CASE("the send status channel needs five events from boot") {
  Model m = restricted_model(load("cfg1.sk"), SemanticsVariant::arinc, k_focus_alphabet);
  ReachableSet rs = explore(m);
  ViewTable vt = build_view_table(m, rs);

  BoundedOptions opt;
  opt.bound = 5;
  opt.seq_budget = 20000;
  opt.property_mask = 0x03; // the two initial-state properties only
  PropertyRun run = check_bounded_properties(m, rs, vt, opt);

  CHECK_FALSE(run[PropertyId::noninterference].holds);
  CHECK(run[PropertyId::noninterference].fail_length == 5);
  CHECK_FALSE(run[PropertyId::weak_noninterference].holds);
  CHECK(run[PropertyId::weak_noninterference].fail_length == 5);

  REQUIRE(run[PropertyId::noninterference].witness.has_value());
  const Counterexample& w = *run[PropertyId::noninterference].witness;
  CHECK(replay(m, w).reproduced);
  CHECK(w.split_a == 0);
  CHECK(w.prefix_a.size() == 5);

  // The same alphabet under the lossy send is quiet even this deep.
  Model f = restricted_model(load("cfg1.sk"), SemanticsVariant::fixed, k_focus_alphabet);
  ReachableSet rsf = explore(f);
  ViewTable vtf = build_view_table(f, rsf);
  PropertyRun runf = check_bounded_properties(f, rsf, vtf, opt);
  CHECK(runf[PropertyId::noninterference].holds);
  CHECK(runf[PropertyId::weak_noninterference].holds);
}

TEST_CASE("sequence budgets stop runaway walks") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  ReachableSet rs = explore(m);
  ViewTable vt = build_view_table(m, rs);
  BoundedOptions opt;
  opt.bound = 5;
  opt.seq_budget = 100000; // depth 5 over 32 events blows well past this
  CHECK_THROWS_AS(check_bounded_properties(m, rs, vt, opt), SequenceBudgetExceeded);
}
