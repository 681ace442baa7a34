#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "skiff/skiff.hpp"

// One line per acceptance criterion, [PASS] or [FAIL]. Exit status is the
// number of failing criteria.

using namespace skiff;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
  std::printf("[%s] %d. %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  if (!ok) ++failures;
}

std::string env(const char* name) {
  const char* v = std::getenv(name);
  if (!v) {
    std::fprintf(stderr, "missing environment variable %s\n", name);
    std::exit(2);
  }
  return v;
}

std::string config_path(const std::string& name) { return env("SKIFF_CONFIG_DIR") + "/" + name; }

SysConfig load(const std::string& name) {
  std::ifstream in(config_path(name));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Model model(const std::string& name, SemanticsVariant v,
            std::optional<PortIdStrategy> ids = std::nullopt,
            TransmitterView tx = TransmitterView::source_only) {
  SysConfig c = load(name);
  if (ids) c.portid_strategy = *ids;
  return make_model(std::move(c), v, tx);
}

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

uint64_t create_wsc_violations(const nlohmann::json& report) {
  uint64_t total = 0;
  for (const auto& check : report.at("checks")) {
    if (check.at("name") != "weak_step_consistent") continue;
    for (const auto& k : check.at("by_kind"))
      if (k.at("kind").get<std::string>().rfind("Create_", 0) == 0)
        total += k.at("violations").get<uint64_t>();
  }
  return total;
}

std::set<EventKind> lr_violating_kinds(const UnwindingReport& rep) {
  std::set<EventKind> out;
  for (int k = 0; k < k_event_kinds; ++k)
    if (rep.by_kind[k].lr_violations) out.insert((EventKind)k);
  return out;
}

} // namespace

int main() {
  const std::string bin = env("SKIFF_BIN");

  // 1 + 2: the faithful queuing semantics leaks through the send status and
  // through the blocked transfer, with a small replayable witness.
  {
    auto t0 = std::chrono::steady_clock::now();
    Model m = model("cfg1.sk", SemanticsVariant::arinc);
    ReachableSet rs = explore(m);
    UnwindingReport rep = verify_unwinding(m, rs, build_view_table(m, rs));
    double elapsed = seconds_since(t0);

    bool c1 = !rep.wsc_ok &&
              rep.by_kind[(int)EventKind::send_queuing_message].wsc_violations > 0 &&
              rep.wsc_witness.has_value() && rep.wsc_witness->event.has_value() &&
              rep.wsc_witness->event->kind == EventKind::send_queuing_message &&
              rep.wsc_witness->total_events() <= 6 &&
              replay(m, *rep.wsc_witness).reproduced && elapsed < 10.0;
    verdict(1, c1,
            "full-queue send status breaks step consistency, with a minimized witness of at "
            "most 6 events that replays, in under 10 seconds");

    bool c2 = rep.by_kind[(int)EventKind::transfer_queuing].wsc_violations > 0;
    verdict(2, c2, "the same run shows the blocked queuing transfer leaking back to the sender");
  }

  // 3: counter-assigned port ids leak creation history; boot-assigned ids
  // do not, with the semantics held fixed.
  {
    std::string base = bin + " --config " + config_path("cfg1.sk") +
                       " --semantics arinc --checks unwinding --format json";
    RunResult counter = run(base + " --portids counter");
    RunResult boot = run(base + " --portids static");
    bool parsed = false;
    uint64_t leak = 0, quiet = 1;
    try {
      leak = create_wsc_violations(nlohmann::json::parse(counter.out));
      quiet = create_wsc_violations(nlohmann::json::parse(boot.out));
      parsed = true;
    } catch (...) {
    }
    bool c3 = parsed && counter.code == 1 && leak > 0 && quiet == 0;
    verdict(3, c3,
            "counter port ids make port creation step-inconsistent; ids assigned at boot show "
            "no creation leak");
  }

  // 4: the repaired kernel passes both unwinding conditions over the whole
  // reachable set and the bounded trace properties exhaustively at length 2.
  {
    auto t0 = std::chrono::steady_clock::now();
    Model m = model("cfg1.sk", SemanticsVariant::fixed);
    ReachableSet rs = explore(m);
    ViewTable vt = build_view_table(m, rs);
    UnwindingReport u = verify_unwinding(m, rs, vt);
    BoundedOptions opt;
    opt.bound = 2;
    PropertyRun pr = check_bounded_properties(m, rs, vt, opt);
    bool bounded_ok = true;
    for (const auto& v : pr.verdicts) bounded_ok &= v.holds;
    double elapsed = seconds_since(t0);
    bool c4 = u.lr_ok && u.wsc_ok && bounded_ok && elapsed < 60.0;
    verdict(4, c4,
            "the repaired kernel satisfies both unwinding conditions and every bounded trace "
            "property at length 2, in under 60 seconds");
  }

  // 5: across the configuration matrix, verdict vectors respect the
  // implication order, and unwinding success forces every bounded property.
  {
    struct Setup {
      const char* cfg;
      SemanticsVariant v;
      std::optional<PortIdStrategy> ids;
    };
    const Setup setups[] = {
        {"cfg1.sk", SemanticsVariant::arinc, std::nullopt},
        {"cfg1.sk", SemanticsVariant::fixed, std::nullopt},
        {"cfg1.sk", SemanticsVariant::arinc, PortIdStrategy::runtime_counter},
        {"cfg1.sk", SemanticsVariant::fixed, PortIdStrategy::runtime_counter},
        {"cfg3.sk", SemanticsVariant::arinc, std::nullopt},
        {"cfg3.sk", SemanticsVariant::fixed, std::nullopt},
    };
    bool c5 = true;
    for (const Setup& su : setups) {
      Model m = model(su.cfg, su.v, su.ids);
      ReachableSet rs = explore(m);
      ViewTable vt = build_view_table(m, rs);
      UnwindingReport u = verify_unwinding(m, rs, vt);
      BoundedOptions opt;
      opt.bound = 2;
      opt.minimize_witnesses = false;
      PropertyRun pr = check_bounded_properties(m, rs, vt, opt);

      std::array<bool, k_properties> holds{};
      for (int p = 0; p < k_bounded_properties; ++p) holds[p] = pr.verdicts[p].holds;
      holds[(int)PropertyId::local_respect] = u.lr_ok;
      holds[(int)PropertyId::weak_step_consistent] = u.wsc_ok;

      for (const auto& rule : property_implications()) {
        bool premises = true;
        for (PropertyId p : rule.premises) premises &= holds[(int)p];
        if (premises && !holds[(int)rule.conclusion]) c5 = false;
      }
      if (u.lr_ok && u.wsc_ok)
        for (int p = 0; p < k_bounded_properties; ++p) c5 &= holds[p];
    }
    verdict(5, c5,
            "verdict vectors across two layouts, both semantics and both id schemes never "
            "violate the implication order, and unwinding success forces every bounded "
            "property");
  }

  // 6: structural invariants hold on all reachable states of every shipped
  // configuration; a corrupted state is caught.
  {
    bool c6 = true;
    for (const char* cfg : {"cfg1.sk", "cfg3.sk", "sampling_pair.sk"})
      for (SemanticsVariant v : {SemanticsVariant::arinc, SemanticsVariant::fixed}) {
        Model m = model(cfg, v);
        ReachableSet rs = explore(m);
        InvariantReport rep = check_invariants(m, rs);
        c6 &= rep.ok && rep.checked == rs.size();
      }
    Model m = model("cfg1.sk", SemanticsVariant::arinc);
    ReachableSet rs = explore(m);
    rs.states[rs.size() / 2].current = k_scheduler;
    c6 &= !check_invariants(m, rs).ok;
    verdict(6, c6,
            "all reachable states of every shipped configuration are structurally sound, and "
            "a deliberately corrupted state is rejected");
  }

  // 7: the call contract suite is large, spans the API, passes everywhere,
  // and the create-sampling contract passes on real instances.
  {
    Model m = model("cfg1.sk", SemanticsVariant::arinc);
    ReachableSet rs = explore(m);
    HoareReport hr = run_hoare_suite(m, rs);

    Model sp = model("sampling_pair.sk", SemanticsVariant::arinc);
    ReachableSet rss = explore(sp);
    HoareReport hs = run_hoare_suite(sp, rss);

    const char* create_case = "create sampling port binds a fresh id and empty buffer";
    bool create_ok = false;
    for (const auto& r : hs.results)
      if (r.name == create_case) create_ok = r.instances > 0 && r.violations == 0;

    bool c7 = hr.ok && (int)hr.results.size() >= 33 && hr.kinds_spanned >= 15 && hs.ok &&
              create_ok;
    verdict(7, c7,
            "at least 33 call contracts spanning 15 event kinds hold on every reachable "
            "state, including port creation binding a fresh id on live instances");
  }

  // 8: reports are byte-stable and every printed replay command reproduces
  // its violation.
  {
    std::string cmd =
        bin + " --config " + config_path("cfg1.sk") + " --semantics arinc --format json";
    RunResult a = run(cmd);
    RunResult b = run(cmd);
    bool c8 = a.code == 1 && !a.out.empty() && a.out == b.out;
    int replayed = 0;
    try {
      nlohmann::json rep = nlohmann::json::parse(a.out);
      for (const auto& check : rep.at("checks")) {
        if (!check.contains("witness")) continue;
        RunResult rr = run(check.at("witness").at("replay").get<std::string>());
        c8 &= rr.code == 0 && rr.out.rfind("reproduced:", 0) == 0;
        ++replayed;
      }
    } catch (...) {
      c8 = false;
    }
    c8 &= replayed >= 1;
    verdict(8, c8,
            "two runs emit byte-identical reports and every printed replay command "
            "reproduces its violation (" +
                std::to_string(replayed) + " commands)");
  }

  // 9: a transmitter allowed to read destination buffers observes the
  // receivers draining them; the write-side transmitter observes nothing.
  {
    Model full = model("cfg1.sk", SemanticsVariant::fixed, std::nullopt, TransmitterView::full);
    ReachableSet rsf = explore(full);
    UnwindingReport uf = verify_unwinding(full, rsf, build_view_table(full, rsf));
    std::set<EventKind> want = {EventKind::receive_queuing_message,
                                EventKind::clear_queuing_port};
    bool full_leaks = !uf.lr_ok && lr_violating_kinds(uf) == want &&
                      uf.lr_witness.has_value() && uf.lr_witness->observer == k_transmitter &&
                      replay(full, *uf.lr_witness).reproduced;

    Model blind = model("cfg1.sk", SemanticsVariant::fixed);
    ReachableSet rsb = explore(blind);
    UnwindingReport ub = verify_unwinding(blind, rsb, build_view_table(blind, rsb));

    verdict(9, full_leaks && ub.lr_ok,
            "a transmitter that reads destination buffers sees receive and clear against "
            "policy; the write-side transmitter sees neither");
  }

  std::printf("%d of 9 criteria pass\n", 9 - failures);
  return failures;
}
