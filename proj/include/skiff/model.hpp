#pragma once

#include "skiff/alphabet.hpp"
#include "skiff/equivalence.hpp"
#include "skiff/kernel.hpp"

namespace skiff {

// Everything a check needs: the configuration, the semantic knobs, the
// derived flow policy and the instantiated event alphabet.
struct Model {
  SysConfig cfg;
  SemanticsVariant variant = SemanticsVariant::fixed;
  TransmitterView tx_view = TransmitterView::source_only;
  Policy policy;
  std::vector<Event> alphabet;
  State s0;

  State step(const State& s, const Event& e) const { return exec_event(cfg, s, e, variant); }
  State run(const State& s, std::span<const Event> as) const {
    return execute(cfg, as, s, variant);
  }
};

inline Model make_model(SysConfig cfg, SemanticsVariant variant,
                        TransmitterView tx_view = TransmitterView::source_only) {
  Model m;
  m.cfg = std::move(cfg);
  m.variant = variant;
  m.tx_view = tx_view;
  m.policy = derive_policy(m.cfg);
  m.alphabet = instantiate_alphabet(m.cfg);
  m.s0 = init(m.cfg);
  return m;
}

} // namespace skiff
