#pragma once

#include "wpan/protocol.hpp"

// Per-node MAC service machinery: how long a head-of-line packet keeps the
// MAC busy and with what probability it is dropped, as a function of the
// CCA-busy probability alpha and the per-transmission failure probability
// gamma.  All durations in symbols, all rates per symbol.

namespace wpan {

struct ServiceDiscard {
  double b_bar;      // mean backoff+CCA time of one transmission attempt
  double beta;       // CCA attempt rate while in backoff: E[#CCA] / b_bar
  double b;          // share of a busy MAC's time spent not transmitting
  double t1;         // mean backoff+CCA time when some CCA succeeds
  double t2;         // backoff+CCA time when every CCA in the attempt fails
  double z_bar;      // mean total backoff+CCA time per head-of-line packet
  double y_bar;      // mean total on-air time per head-of-line packet
  double sigma;      // head-of-line service rate, 1 / (z_bar + y_bar)
  double delta;      // probability the MAC gives up on the packet
  double hop_loss;   // probability the packet never reaches the parent
};

// Requires 0 <= alpha < 1 and 0 <= gamma <= 1; throws std::domain_error
// otherwise.  With ACKs, hop_loss == delta (a packet is re-sent until it is
// either acknowledged or given up on).  Without ACKs there is exactly one
// transmission: delta only counts channel-access failure, while hop_loss
// also includes the undetected transmission failure.
ServiceDiscard service_and_discard(double alpha, double gamma,
                                   const ProtocolParams& p);

}  // namespace wpan
