#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "skiff/equivalence.hpp"
#include "skiff/model.hpp"
#include "skiff/reach.hpp"

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

State after(const Model& m, const std::string& trace) {
  return m.run(m.s0, parse_trace(m.cfg, trace));
}

} // namespace

TEST_CASE("view components cover exactly what each domain may observe") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  State s = after(m, "Send_Queuing_Message(qs, m0); Schedule(Transmitter); "
                     "Transfer_Queuing_Message(C)");

  auto names = [&](int d) {
    std::vector<std::string> out;
    for (const auto& c : view_components(m.cfg, m.tx_view, d, s)) out.push_back(c.name);
    return out;
  };

  CHECK(names(k_scheduler) == std::vector<std::string>{"last_result", "current"});
  // Source-only transmitter: flags of both ports, buffer of the source only.
  CHECK(names(k_transmitter) ==
        std::vector<std::string>{"last_result", "created(qs)", "created(qd)", "buffer(qs)"});
  // P1 owns only the source port, so no buffer at all.
  CHECK(names(2) == std::vector<std::string>{"last_result", "mode", "created(qs)"});
  // P2 owns the destination port and sees its contents.
  CHECK(names(3) == std::vector<std::string>{"last_result", "mode", "created(qd)", "buffer(qd)"});

  auto full = view_components(m.cfg, TransmitterView::full, k_transmitter, s);
  std::vector<std::string> full_names;
  for (const auto& c : full) full_names.push_back(c.name);
  CHECK(full_names == std::vector<std::string>{"last_result", "created(qs)", "created(qd)",
                                               "buffer(qs)", "buffer(qd)"});
}

TEST_CASE("a partition cannot see another partition acting") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  State before = m.s0;
  State sent = after(m, "Send_Queuing_Message(qs, m0)");

  CHECK_FALSE(vpeq(m.cfg, m.tx_view, 2, before, sent)); // sender saw its own status
  CHECK(vpeq(m.cfg, m.tx_view, 3, before, sent));       // receiver saw nothing
  CHECK(vpeq(m.cfg, m.tx_view, k_scheduler, before, sent));
  // The queued message sits in a source buffer, visible to the transmitter.
  CHECK_FALSE(vpeq(m.cfg, m.tx_view, k_transmitter, before, sent));
}

TEST_CASE("schedules move only the scheduler's view") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  State before = m.s0;
  State switched = after(m, "Schedule(P2)");
  CHECK_FALSE(vpeq(m.cfg, m.tx_view, k_scheduler, before, switched));
  for (int d = 1; d < m.cfg.n_domains(); ++d) CHECK(vpeq(m.cfg, m.tx_view, d, before, switched));
}

TEST_CASE("destination drains are invisible to the source-only transmitter") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  State full_dest = after(m, "Send_Queuing_Message(qs, m0); Schedule(Transmitter); "
                             "Transfer_Queuing_Message(C); Schedule(P2)");
  State drained = m.step(full_dest, parse_event(m.cfg, "Receive_Queuing_Message(qd)"));

  CHECK(vpeq(m.cfg, TransmitterView::source_only, k_transmitter, full_dest, drained));
  CHECK_FALSE(vpeq(m.cfg, TransmitterView::full, k_transmitter, full_dest, drained));
  CHECK_FALSE(vpeq(m.cfg, m.tx_view, 3, full_dest, drained)); // receiver took the message
  CHECK(vpeq(m.cfg, m.tx_view, 2, full_dest, drained));
}

TEST_CASE("views key buffers by declared port, not by runtime id") {
  Model m = make_model(load("sampling_pair.sk"), SemanticsVariant::arinc);
  REQUIRE(m.cfg.portid_strategy == PortIdStrategy::runtime_counter);

  // Same final situation, but sd ends up with id 2 in one run and id 1 in
  // the other. The action call at the end equalizes the ret registers.
  State a = after(m, "Create_Sampling_Port(sp); Schedule(S2); Create_Sampling_Port(sd); "
                     "Schedule(S1); Write_Sampling_Message(#1, m1); Schedule(Transmitter); "
                     "Transfer_Sampling_Message(S); Schedule(S2); Partition_Action(a2)");
  State b = after(m, "Schedule(S2); Create_Sampling_Port(sd); Schedule(S1); "
                     "Create_Sampling_Port(sp); Write_Sampling_Message(#2, m1); "
                     "Schedule(Transmitter); Transfer_Sampling_Message(S); Schedule(S2); "
                     "Partition_Action(a2)");

  int sd = m.cfg.find_port("sd");
  REQUIRE(a.comm.id_of_port[sd] == 2);
  REQUIRE(b.comm.id_of_port[sd] == 1);
  CHECK(vpeq(m.cfg, m.tx_view, 3, a, b)); // S2 sees the same created flag and [m1]
  CHECK(view_bytes(m.cfg, m.tx_view, 3, a) == view_bytes(m.cfg, m.tx_view, 3, b));
}

TEST_CASE("view equivalence behaves like an equivalence relation on reachable states") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  ReachableSet rs = explore(m);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 3000; ++trial) {
    const State& x = rs.states[rng() % rs.size()];
    const State& y = rs.states[rng() % rs.size()];
    const State& z = rs.states[rng() % rs.size()];
    int d = (int)(rng() % m.cfg.n_domains());
    CHECK(vpeq(m.cfg, m.tx_view, d, x, x));
    CHECK(vpeq(m.cfg, m.tx_view, d, x, y) == vpeq(m.cfg, m.tx_view, d, y, x));
    if (vpeq(m.cfg, m.tx_view, d, x, y) && vpeq(m.cfg, m.tx_view, d, y, z))
      CHECK(vpeq(m.cfg, m.tx_view, d, x, z));
    // The byte encoding is exactly the equivalence kernel.
    CHECK(vpeq(m.cfg, m.tx_view, d, x, y) ==
          (view_bytes(m.cfg, m.tx_view, d, x) == view_bytes(m.cfg, m.tx_view, d, y)));
  }
}

TEST_CASE("set equivalence requires every named domain to agree") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  State s = m.s0;
  State t = after(m, "Send_Queuing_Message(qs, m0)");
  DomainSet p1_only = 1u << 2;
  DomainSet p2_only = 1u << 3;
  DomainSet both = p1_only | p2_only;
  CHECK_FALSE(vpeq_set(m.cfg, m.tx_view, p1_only, s, t));
  CHECK(vpeq_set(m.cfg, m.tx_view, p2_only, s, t));
  CHECK_FALSE(vpeq_set(m.cfg, m.tx_view, both, s, t));
  CHECK(vpeq_set(m.cfg, m.tx_view, 0, s, t)); // empty set distinguishes nothing
}

TEST_CASE("view diffs name the first observable difference") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  State s = m.s0;
  State sent = after(m, "Send_Queuing_Message(qs, m0)");

  ViewDiff d = view_diff(m.cfg, m.tx_view, 2, s, sent);
  CHECK(d.differs());
  CHECK(d.component == "last_result");
  CHECK(d.left == "-");
  CHECK(d.right == "NO_ERROR");

  ViewDiff tx = view_diff(m.cfg, m.tx_view, k_transmitter, s, sent);
  CHECK(tx.component == "buffer(qs)");
  CHECK(tx.left == "[]");
  CHECK(tx.right == "[m0]");

  ViewDiff same = view_diff(m.cfg, m.tx_view, 3, s, sent);
  CHECK_FALSE(same.differs());

  std::string rendered = render_view(m.cfg, m.tx_view, 3, sent);
  CHECK(rendered.find("last_result") != std::string::npos);
  CHECK(rendered.find("buffer(qd)") != std::string::npos);
}

TEST_CASE("view tables intern exactly the view classes") {
  Model m = make_model(load("cfg1.sk"), SemanticsVariant::arinc);
  ReachableSet rs = explore(m);
  ViewTable vt = build_view_table(m, rs);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 4000; ++trial) {
    int a = (int)(rng() % rs.size());
    int b = (int)(rng() % rs.size());
    int d = (int)(rng() % m.cfg.n_domains());
    CHECK((vt.view_id[d][a] == vt.view_id[d][b]) ==
          vpeq(m.cfg, m.tx_view, d, rs.states[a], rs.states[b]));
  }
  // Scheduler views factor through ret (always unset for it) and current.
  CHECK(vt.n_views[k_scheduler] == 1 + m.cfg.n_partitions());
}
