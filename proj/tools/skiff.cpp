#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "skiff/skiff.hpp"

namespace {

skiff::SysConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw skiff::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return skiff::parse_config(ss.str());
}

struct CommonOpts {
  std::string config_path;
  std::string semantics = "fixed";
  std::string portids; // empty = keep the file's choice
  std::string tx_view = "source-only";
};

void add_common(CLI::App& app, CommonOpts& o) {
  app.add_option("--config", o.config_path, "model configuration file");
  app.add_option("--semantics", o.semantics, "kernel semantics: arinc or fixed")
      ->check(CLI::IsMember({"arinc", "fixed"}));
  app.add_option("--portids", o.portids, "port id assignment: static or counter")
      ->check(CLI::IsMember({"static", "counter"}));
  app.add_option("--transmitter-view", o.tx_view,
                 "what the transmitter observes: source-only or full")
      ->check(CLI::IsMember({"source-only", "full"}));
}

skiff::Model build_model(const CommonOpts& o) {
  if (o.config_path.empty()) throw skiff::ConfigError("--config is required");
  skiff::SysConfig cfg = load_config(o.config_path);
  if (o.portids == "static") cfg.portid_strategy = skiff::PortIdStrategy::static_from_config;
  if (o.portids == "counter") cfg.portid_strategy = skiff::PortIdStrategy::runtime_counter;
  auto variant =
      o.semantics == "arinc" ? skiff::SemanticsVariant::arinc : skiff::SemanticsVariant::fixed;
  auto tx = o.tx_view == "full" ? skiff::TransmitterView::full : skiff::TransmitterView::source_only;
  return skiff::make_model(std::move(cfg), variant, tx);
}

int run_check(const CommonOpts& common, const std::string& checks_csv, int bound, int budget,
              uint64_t seq_budget, const std::string& format, bool timings,
              const std::string& program) {
  std::set<std::string> checks;
  {
    std::stringstream ss(checks_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) checks.insert(item);
    static const std::set<std::string> known{"reach", "invariants", "hoare", "unwinding",
                                             "properties"};
    for (const auto& c : checks)
      if (!known.count(c)) {
        std::cerr << "unknown check '" << c << "'\n";
        return 2;
      }
  }

  skiff::Model m = build_model(common);
  skiff::RunReport rep;
  rep.config_path = common.config_path;

  auto t0 = std::chrono::steady_clock::now();
  skiff::ReachableSet rs = skiff::explore(m, budget);
  skiff::ViewTable vt = skiff::build_view_table(m, rs);

  if (checks.count("reach")) rep.states = rs.size();
  if (checks.count("invariants")) rep.invariants = skiff::check_invariants(m, rs);
  if (checks.count("hoare")) rep.hoare = skiff::run_hoare_suite(m, rs);
  if (checks.count("unwinding")) rep.unwinding = skiff::verify_unwinding(m, rs, vt);
  if (checks.count("properties")) {
    skiff::BoundedOptions opt;
    opt.bound = bound;
    opt.seq_budget = seq_budget;
    rep.properties = skiff::check_bounded_properties(m, rs, vt, opt);
  }
  if (timings)
    rep.wallclock_ms = (uint64_t)std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();

  skiff::ReportContext ctx{program, common.config_path};
  if (format == "json")
    std::cout << skiff::report_json(m, rep, ctx).dump(2) << "\n";
  else
    std::cout << skiff::report_text(m, rep, ctx);
  return skiff::report_all_hold(rep) ? 0 : 1;
}

int run_replay(const CommonOpts& common, const std::string& property, const std::string& observer,
               const std::string& prefix_a, const std::string& prefix_b, int split_a, int split_b,
               const std::string& event_str) {
  skiff::Model m = build_model(common);

  skiff::Counterexample c;
  auto prop = skiff::property_from_name(property);
  if (!prop) {
    std::cerr << "unknown property '" << property << "'\n";
    return 2;
  }
  c.property = *prop;
  int d = m.cfg.parse_domain(observer);
  if (d < 0) {
    std::cerr << "unknown observer domain '" << observer << "'\n";
    return 2;
  }
  c.observer = d;
  c.prefix_a = skiff::parse_trace(m.cfg, prefix_a);
  c.prefix_b = skiff::parse_trace(m.cfg, prefix_b);
  c.split_a = split_a;
  c.split_b = split_b;
  if (split_a < 0 || split_a > (int)c.prefix_a.size() || split_b < 0 ||
      split_b > (int)c.prefix_b.size()) {
    std::cerr << "split outside its prefix\n";
    return 2;
  }
  if (!event_str.empty()) c.event = skiff::parse_event(m.cfg, event_str);

  skiff::ReplayOutcome out = skiff::replay(m, c);
  if (out.reproduced) {
    std::cout << "reproduced: " << skiff::property_name(c.property) << " violation observed by '"
              << m.cfg.domain_name(c.observer) << "' (" << skiff::render_witness_diff(m, c)
              << ")\n";
    return 0;
  }
  std::cout << "not reproduced: " << out.reason << "\n";
  return 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"separation kernel model checker"};
  app.require_subcommand(0, 1);

  CommonOpts check_opts;
  std::string checks_csv = "reach,invariants,hoare,unwinding,properties";
  int bound = 2;
  int budget = 200000;
  uint64_t seq_budget = 2000000;
  std::string format = "text";
  bool timings = false;
  add_common(app, check_opts);
  app.add_option("--checks", checks_csv, "comma separated subset of reach,invariants,hoare,unwinding,properties");
  app.add_option("--bound", bound, "sequence length bound for the trace properties")
      ->check(CLI::Range(0, 16));
  app.add_option("--budget", budget, "reachable state budget");
  app.add_option("--seq-budget", seq_budget, "sequence tree node budget");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--timings", timings, "measure and report wallclock time");

  CLI::App* replay_cmd = app.add_subcommand("replay", "re-check a reported counterexample");
  CommonOpts replay_opts;
  std::string property, observer, prefix_a, prefix_b, event_str;
  int split_a = 0, split_b = 0;
  add_common(*replay_cmd, replay_opts);
  replay_cmd->add_option("--property", property, "property the witness refutes")->required();
  replay_cmd->add_option("--observer", observer, "observing domain")->required();
  replay_cmd->add_option("--prefix-a", prefix_a, "first event sequence");
  replay_cmd->add_option("--prefix-b", prefix_b, "second event sequence");
  replay_cmd->add_option("--split-a", split_a, "events of prefix a that only reach the start state");
  replay_cmd->add_option("--split-b", split_b, "events of prefix b that only reach the start state");
  replay_cmd->add_option("--event", event_str, "distinguishing event, for the stepwise conditions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (replay_cmd->parsed())
      return run_replay(replay_opts, property, observer, prefix_a, prefix_b, split_a, split_b,
                        event_str);
    return run_check(check_opts, checks_csv, bound, budget, seq_budget, format, timings, argv[0]);
  } catch (const skiff::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const skiff::TraceError& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return 2;
  } catch (const skiff::BudgetExceeded& e) {
    std::cerr << "state budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const skiff::SequenceBudgetExceeded& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
