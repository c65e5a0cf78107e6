#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wpan/network.hpp"
#include "wpan/protocol.hpp"

// Symbol-resolution discrete-event simulation of the unslotted CSMA/CA
// convergecast.  Integer clock in symbol periods; events are processed in
// (time, node-id, event-kind) order, so runs are bit-reproducible for a
// given seed on any platform.

namespace wpan {

struct SimConfig {
  double duration_s = 1500.0;
  double warmup_s = 50.0;
  int reps = 25;
  uint64_t seed = 1;
  bool record_pair_stats = false;         // per-(scanner, observer) CCA splits
  std::optional<double> lambda_pps_override;  // force every source's rate
};

struct NodeCounters {
  int64_t cca_attempts = 0;
  int64_t cca_busy = 0;
  int64_t tx_count = 0;         // transmissions whose outcome is known
  int64_t tx_failures = 0;      // collided or hit by link error
  int64_t hol_completions = 0;  // head-of-line packets resolved
  int64_t discards = 0;         // given up by the MAC (CCA or retry exhaustion)
  int64_t busy_symbols = 0;     // queue non-empty time inside the window
  int64_t tx_symbols = 0;       // on-air time inside the window
  int max_ccas_per_attempt = 0;
  int max_tx_per_packet = 0;

  double alpha_hat() const {
    return cca_attempts ? double(cca_busy) / double(cca_attempts) : 0.0;
  }
  double gamma_hat() const {
    return tx_count ? double(tx_failures) / double(tx_count) : 0.0;
  }
  double delta_hat() const {
    return hol_completions ? double(discards) / double(hol_completions) : 0.0;
  }
  double b_hat() const {
    return busy_symbols ? double(busy_symbols - tx_symbols) / double(busy_symbols)
                        : 0.0;
  }
};

struct SourceCounters {
  int64_t generated = 0;  // packets created inside the window
  int64_t delivered = 0;
  int64_t dropped = 0;    // lost at any hop
  int64_t in_flight = 0;  // still queued somewhere when the run ended
  double delay_sum_symbols = 0.0;

  double p_del_hat() const {
    const int64_t resolved = delivered + dropped;
    return resolved ? double(delivered) / double(resolved) : 1.0;
  }
  double mean_delay_symbols() const {
    return delivered ? delay_sum_symbols / double(delivered) : 0.0;
  }
};

struct SimRun {
  int64_t window_symbols = 0;
  std::vector<NodeCounters> nodes;      // dense-indexed
  std::vector<SourceCounters> sources;  // dense-indexed, zero for non-sources
  // Only filled when record_pair_stats is set: for scanner j and observer
  // i, the number of failed CCAs of j whose blockers were all hidden from i.
  std::vector<std::vector<int64_t>> cca_hidden_only;
};

SimRun simulate_once(const NetworkModel& m, const Neighborhoods& nb,
                     const ProtocolParams& p, const SimConfig& cfg,
                     uint64_t seed);

struct MeanCi {
  double mean = 0.0;
  double ci95 = 0.0;
};

struct NodeAggregate {
  MeanCi alpha, gamma, delta, q, b;
};

struct SourceAggregate {
  MeanCi p_del, delay_ms;
  int64_t delivered_total = 0;
};

struct SimAggregate {
  std::vector<NodeAggregate> nodes;      // dense-indexed
  std::vector<SourceAggregate> sources;  // dense-indexed
  MeanCi sum_q;
  int reps = 0;
};

// Runs cfg.reps independent replications with per-replication seeds derived
// from cfg.seed and aggregates them with Student-t 95% intervals.
SimAggregate replicate(const NetworkModel& m, const Neighborhoods& nb,
                       const ProtocolParams& p, const SimConfig& cfg);

}  // namespace wpan
