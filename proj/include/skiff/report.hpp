#pragma once

#include "json.hpp"
#include "skiff/hoare.hpp"
#include "skiff/properties.hpp"
#include "skiff/unwinding.hpp"

namespace skiff {

// Everything one checker invocation produced. Sections are optional because
// the caller picks which checks to run.
struct RunReport {
  std::string config_path;
  std::optional<int> states;
  std::optional<InvariantReport> invariants;
  std::optional<HoareReport> hoare;
  std::optional<UnwindingReport> unwinding;
  std::optional<PropertyRun> properties;
  uint64_t wallclock_ms = 0; // stays 0 unless timings were requested
};

inline bool report_all_hold(const RunReport& r) {
  if (r.invariants && !r.invariants->ok) return false;
  if (r.hoare && !r.hoare->ok) return false;
  if (r.unwinding && !(r.unwinding->lr_ok && r.unwinding->wsc_ok)) return false;
  if (r.properties)
    for (const auto& v : r.properties->verdicts)
      if (!v.holds) return false;
  return true;
}

inline uint64_t report_pairs(const RunReport& r) {
  uint64_t p = 0;
  if (r.unwinding) p += r.unwinding->pairs;
  if (r.properties) p += r.properties->pairs;
  return p;
}

// The program name and config path are only needed to print replay commands.
struct ReportContext {
  std::string program = "skiff";
  std::string config_path;
};

inline nlohmann::json witness_json(const Model& m, const ReportContext& ctx,
                                   const Counterexample& c) {
  nlohmann::json w;
  w["property"] = property_name(c.property);
  w["observer"] = m.cfg.domain_name(c.observer);
  w["prefix_a"] = render_trace(m.cfg, c.prefix_a);
  w["prefix_b"] = render_trace(m.cfg, c.prefix_b);
  w["split_a"] = c.split_a;
  w["split_b"] = c.split_b;
  if (c.event) w["event"] = render_event(m.cfg, *c.event);
  w["diff"] = c.diff;
  w["replay"] = replay_command(m, ctx.program, ctx.config_path, c);
  return w;
}

inline nlohmann::json report_json(const Model& m, const RunReport& r, const ReportContext& ctx) {
  nlohmann::json out;
  out["config"] = r.config_path;
  out["variant"] = variant_name(m.variant);
  out["port_ids"] = m.cfg.portid_strategy == PortIdStrategy::static_from_config ? "static"
                                                                                : "counter";
  out["transmitter_view"] = transmitter_view_name(m.tx_view);

  nlohmann::json checks = nlohmann::json::array();
  if (r.states) {
    nlohmann::json c;
    c["name"] = "reach";
    c["holds"] = true;
    c["states"] = *r.states;
    checks.push_back(c);
  }
  if (r.invariants) {
    nlohmann::json c;
    c["name"] = "invariants";
    c["holds"] = r.invariants->ok;
    c["states_checked"] = r.invariants->checked;
    if (!r.invariants->ok) c["first_violation"] = r.invariants->first_violation;
    checks.push_back(c);
  }
  if (r.hoare) {
    nlohmann::json c;
    c["name"] = "hoare";
    c["holds"] = r.hoare->ok;
    c["kinds_spanned"] = r.hoare->kinds_spanned;
    nlohmann::json cases = nlohmann::json::array();
    for (const auto& hr : r.hoare->results) {
      nlohmann::json hc;
      hc["name"] = hr.name;
      hc["kind"] = hr.kind >= 0 ? event_kind_name((EventKind)hr.kind) : "any";
      hc["instances"] = hr.instances;
      hc["violations"] = hr.violations;
      if (hr.witness) {
        hc["witness"] = {{"prefix", render_trace(m.cfg, hr.witness->path)},
                         {"event", render_event(m.cfg, hr.witness->event)}};
      }
      cases.push_back(hc);
    }
    c["cases"] = cases;
    checks.push_back(c);
  }
  if (r.unwinding) {
    auto kind_rows = [&](bool lr) {
      nlohmann::json rows = nlohmann::json::array();
      for (int k = 0; k < k_event_kinds; ++k) {
        const KindUnwinding& ku = r.unwinding->by_kind[k];
        uint64_t inst = lr ? ku.lr_instances : ku.wsc_pairs;
        uint64_t bad = lr ? ku.lr_violations : ku.wsc_violations;
        if (!inst && !bad) continue;
        rows.push_back({{"kind", event_kind_name((EventKind)k)},
                        {lr ? "instances" : "pairs", inst},
                        {"violations", bad}});
      }
      return rows;
    };
    {
      nlohmann::json c;
      c["name"] = "local_respect";
      c["holds"] = r.unwinding->lr_ok;
      c["by_kind"] = kind_rows(true);
      if (r.unwinding->lr_witness) c["witness"] = witness_json(m, ctx, *r.unwinding->lr_witness);
      checks.push_back(c);
    }
    {
      nlohmann::json c;
      c["name"] = "weak_step_consistent";
      c["holds"] = r.unwinding->wsc_ok;
      c["by_kind"] = kind_rows(false);
      if (r.unwinding->wsc_witness) c["witness"] = witness_json(m, ctx, *r.unwinding->wsc_witness);
      checks.push_back(c);
    }
  }
  if (r.properties) {
    for (const auto& v : r.properties->verdicts) {
      nlohmann::json c;
      c["name"] = property_name(v.property);
      c["holds"] = v.holds;
      c["bound"] = v.bound;
      if (!v.holds) c["fail_length"] = v.fail_length;
      if (v.witness) c["witness"] = witness_json(m, ctx, *v.witness);
      checks.push_back(c);
    }
  }
  out["checks"] = checks;

  nlohmann::json stats;
  stats["states"] = r.states ? *r.states : 0;
  stats["pairs"] = report_pairs(r);
  if (r.properties) stats["sequences"] = r.properties->sequences;
  stats["wallclock_ms"] = r.wallclock_ms;
  out["stats"] = stats;
  return out;
}

inline std::string render_witness_text(const Model& m, const ReportContext& ctx,
                                       const Counterexample& c, const std::string& indent) {
  std::string out;
  auto trace = [&](std::span<const Event> t) {
    return t.empty() ? std::string("(empty)") : render_trace(m.cfg, t);
  };
  out += indent + "observer:  " + m.cfg.domain_name(c.observer) + "\n";
  out += indent + "prefix a:  " + trace(c.prefix_a) + "\n";
  out += indent + "prefix b:  " + trace(c.prefix_b) + "\n";
  if (c.split_a || c.split_b)
    out += indent + "splits:    a=" + std::to_string(c.split_a) +
           " b=" + std::to_string(c.split_b) + " (events before the split reach the start states)\n";
  if (c.event) out += indent + "event:     " + render_event(m.cfg, *c.event) + "\n";
  out += indent + "differs:   " + c.diff + "\n";
  out += indent + "replay:    " + replay_command(m, ctx.program, ctx.config_path, c) + "\n";
  return out;
}

inline std::string report_text(const Model& m, const RunReport& r, const ReportContext& ctx) {
  std::string out;
  out += "config: " + r.config_path + " (" + std::to_string(m.cfg.n_partitions()) +
         " partitions, " + std::to_string(m.cfg.n_ports()) + " ports, " +
         std::to_string(m.cfg.n_channels()) + " channels)\n";
  out += std::string("semantics: ") + variant_name(m.variant) + "; port ids: " +
         (m.cfg.portid_strategy == PortIdStrategy::static_from_config ? "static" : "counter") +
         "; transmitter view: " + transmitter_view_name(m.tx_view) + "\n";
  if (r.states) out += "reach: " + std::to_string(*r.states) + " states\n";
  if (r.invariants) {
    out += "invariants: " + std::string(r.invariants->ok ? "ok" : "VIOLATED") + " (" +
           std::to_string(r.invariants->checked) + " states)";
    if (!r.invariants->ok) out += " first: " + r.invariants->first_violation;
    out += "\n";
  }
  if (r.hoare) {
    uint64_t bad = 0, vacuous = 0;
    for (const auto& hr : r.hoare->results) {
      bad += hr.violations ? 1 : 0;
      vacuous += hr.instances ? 0 : 1;
    }
    out += "hoare: " + std::to_string(r.hoare->results.size()) + " cases spanning " +
           std::to_string(r.hoare->kinds_spanned) + " event kinds, " +
           (r.hoare->ok ? "all hold" : std::to_string(bad) + " VIOLATED") +
           (vacuous ? " (" + std::to_string(vacuous) + " vacuous here)" : "") + "\n";
    for (const auto& hr : r.hoare->results)
      if (hr.violations) {
        out += "  case '" + hr.name + "': " + std::to_string(hr.violations) + " violations, e.g. " +
               "after '" +
               (hr.witness->path.empty() ? "(empty)" : render_trace(m.cfg, hr.witness->path)) +
               "' event " + render_event(m.cfg, hr.witness->event) + "\n";
      }
  }
  if (r.unwinding) {
    out += std::string("local_respect: ") + (r.unwinding->lr_ok ? "holds" : "VIOLATED") + "\n";
    for (int k = 0; k < k_event_kinds; ++k) {
      const KindUnwinding& ku = r.unwinding->by_kind[k];
      if (ku.lr_violations)
        out += "  " + std::string(event_kind_name((EventKind)k)) + ": " +
               std::to_string(ku.lr_violations) + " of " + std::to_string(ku.lr_instances) +
               " instances\n";
    }
    if (r.unwinding->lr_witness)
      out += render_witness_text(m, ctx, *r.unwinding->lr_witness, "  ");
    out += std::string("weak_step_consistent: ") + (r.unwinding->wsc_ok ? "holds" : "VIOLATED") +
           "\n";
    for (int k = 0; k < k_event_kinds; ++k) {
      const KindUnwinding& ku = r.unwinding->by_kind[k];
      if (ku.wsc_violations)
        out += "  " + std::string(event_kind_name((EventKind)k)) + ": " +
               std::to_string(ku.wsc_violations) + " disagreements across " +
               std::to_string(ku.wsc_pairs) + " pairs\n";
    }
    if (r.unwinding->wsc_witness)
      out += render_witness_text(m, ctx, *r.unwinding->wsc_witness, "  ");
  }
  if (r.properties) {
    for (const auto& v : r.properties->verdicts) {
      out += std::string(property_name(v.property)) + ": ";
      if (v.holds)
        out += "holds to bound " + std::to_string(v.bound) + "\n";
      else {
        out += "VIOLATED at length " + std::to_string(v.fail_length) + "\n";
        out += render_witness_text(m, ctx, *v.witness, "  ");
      }
    }
    out += "sequences checked: " + std::to_string(r.properties->sequences) + "\n";
  }
  out += "pairs compared: " + std::to_string(report_pairs(r)) + "\n";
  out += std::string("result: ") + (report_all_hold(r) ? "all checks hold" : "violations found") +
         "\n";
  return out;
}

} // namespace skiff
