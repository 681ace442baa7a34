#pragma once

#include <vector>

#include "skiff/event.hpp"

namespace skiff {

// Every runtime event the checker explores, in a fixed deterministic order:
// hypercall kinds in declaration order (name-taking ones across every
// configured port, id-taking ones across every possible runtime id and
// message), then schedules by target domain, transfers by channel, and one
// action token per partition. Init never appears; it is the boot event.
// Mode-mismatched and dangling-id calls stay in the alphabet on purpose:
// totality of the kernel under bad arguments is part of what is checked.
inline std::vector<Event> instantiate_alphabet(const SysConfig& cfg) {
  std::vector<Event> out;
  auto name_kind = [&](EventKind k) {
    for (int p = 0; p < cfg.n_ports(); ++p) out.push_back({k, (int16_t)p});
  };
  auto id_kind = [&](EventKind k) {
    for (int id = 1; id <= cfg.n_ports(); ++id) {
      if (takes_message(k)) {
        for (int m = 0; m < cfg.message_alphabet_size; ++m)
          out.push_back({k, (int16_t)id, (int16_t)m});
      } else {
        out.push_back({k, (int16_t)id});
      }
    }
  };
  for (int ki = 0; ki < k_event_kinds; ++ki) {
    EventKind k = (EventKind)ki;
    if (!is_hypercall(k)) continue;
    if (takes_port_name(k)) name_kind(k);
    else id_kind(k);
  }
  out.push_back({EventKind::schedule, (int16_t)k_transmitter});
  for (int i = 0; i < cfg.n_partitions(); ++i)
    out.push_back({EventKind::schedule, (int16_t)partition_domain(i)});
  for (int c = 0; c < cfg.n_channels(); ++c)
    out.push_back({cfg.channels[c].mode == PortMode::sampling ? EventKind::transfer_sampling
                                                              : EventKind::transfer_queuing,
                   (int16_t)c});
  for (int i = 0; i < cfg.n_partitions(); ++i)
    out.push_back({EventKind::partition_action, (int16_t)i});
  return out;
}

} // namespace skiff
