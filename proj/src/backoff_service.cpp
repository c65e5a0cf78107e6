#include "wpan/backoff_service.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpan {

ServiceDiscard service_and_discard(double alpha, double gamma,
                                   const ProtocolParams& p) {
  if (!(alpha >= 0.0) || alpha >= 1.0)
    throw std::domain_error("service_and_discard: alpha must be in [0,1), got " +
                            std::to_string(alpha));
  if (!(gamma >= 0.0) || gamma > 1.0)
    throw std::domain_error("service_and_discard: gamma must be in [0,1], got " +
                            std::to_string(gamma));

  const int K = p.cca_attempts();
  const double t_tx = p.tx_period();

  // Mean duration of backoff stage k plus its CCA, and running totals.
  std::vector<double> dur(K), cum(K);
  for (int k = 0; k < K; ++k) {
    dur[k] = p.mean_backoff_symbols(k) + p.cca_symbols;
    cum[k] = dur[k] + (k ? cum[k - 1] : 0.0);
  }

  // One transmission attempt: CCA k is reached with probability alpha^k.
  double b_bar = 0.0, attempts = 0.0, ak = 1.0;
  for (int k = 0; k < K; ++k) {
    b_bar += ak * dur[k];
    attempts += ak;
    ak *= alpha;
  }
  const double a_fail = ak;  // alpha^K: every CCA of the attempt busy

  // Backoff+CCA time conditioned on the attempt outcome.
  double t1 = 0.0;
  ak = 1.0;
  for (int k = 0; k < K; ++k) {
    t1 += ak * (1.0 - alpha) * cum[k];
    ak *= alpha;
  }
  if (a_fail < 1.0) t1 /= (1.0 - a_fail);
  const double t2 = cum[K - 1];

  // Chain the allowed transmissions of one packet.  Each level: give up
  // with probability a_fail; otherwise transmit, and with probability
  // gamma move on to the next transmission (ACK mode only).
  const int R = p.transmissions();
  double delta = a_fail + (1.0 - a_fail) * (p.acks_enabled ? gamma : 0.0);
  double z_bar = a_fail * t2 + (1.0 - a_fail) * t1;
  double y_bar = (1.0 - a_fail) * t_tx;
  for (int r = 2; r <= R; ++r) {
    delta = a_fail + (1.0 - a_fail) * gamma * delta;
    z_bar = a_fail * t2 + (1.0 - a_fail) * (t1 + gamma * z_bar);
    y_bar = (1.0 - a_fail) * (t_tx + gamma * y_bar);
  }
  if (!p.acks_enabled) delta = a_fail;

  ServiceDiscard out;
  out.b_bar = b_bar;
  out.beta = attempts / b_bar;
  out.b = b_bar / (b_bar + (1.0 - a_fail) * t_tx);
  out.t1 = t1;
  out.t2 = t2;
  out.z_bar = z_bar;
  out.y_bar = y_bar;
  out.sigma = 1.0 / (z_bar + y_bar);
  out.delta = delta;
  out.hop_loss = p.acks_enabled ? delta : 1.0 - (1.0 - a_fail) * (1.0 - gamma);
  return out;
}

}  // namespace wpan
