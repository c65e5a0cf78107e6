#pragma once

#include <string>
#include <vector>

#include "wpan/backoff_service.hpp"
#include "wpan/network.hpp"
#include "wpan/protocol.hpp"
#include "wpan/scenario.hpp"

// Mean-field fixed point of the per-node CSMA/CA interaction: each node is
// summarized by its CCA-busy probability, transmission-failure probability,
// discard probability, service rate and queue utilization, coupled through
// the attempt rates its neighbors perceive.

namespace wpan {

struct NodeUnknowns {
  double alpha = 0.0;    // probability a CCA finds the channel busy
  double gamma = 0.0;    // probability one transmission fails (collision or link)
  double p = 0.0;        // collision part of gamma
  double delta = 0.0;    // probability the MAC drops the head-of-line packet
  double hop_loss = 0.0; // probability a packet fails to reach the parent
  double q = 0.0;        // queue utilization (busy probability)
  double b = 0.0;        // non-transmitting share of MAC busy time
  double beta = 0.0;     // CCA attempt rate while backing off (per symbol)
  double b_bar = 0.0;    // mean backoff+CCA time per transmission attempt
  double c = 0.0;        // turnaround-window collision-onset probability
  double eta = 1.0;      // chance this node's clock beats its neighbors'
  double sigma = 0.0;    // head-of-line service rate (per symbol)
  double nu = 0.0;       // total arrival rate into the queue (per symbol)
  double theta = 0.0;    // rate of packets handed to the parent (per symbol)
  double t_eff = 0.0;    // mean channel-busy period blocking this node
  double h_bar = 1.0;    // probability the node is silent: 1 - q + q*b
  double tau_uncond = 0.0;          // attempt rate unconditioned on observer
  std::vector<double> tau_seen;     // attempt rate of omega[i][k] as seen by i
};

struct FixedPointResult {
  std::vector<NodeUnknowns> nodes;  // dense-indexed; the BS entry is inert
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- individual relations, exposed for direct testing ----

struct ContentionView {
  double eta;  // beta / (beta + sum_tau)
  double g;    // 1 / (beta + sum_tau)
  double c;    // 1 - exp(-turnaround * beta)
};
ContentionView contention_view(double beta, double sum_tau,
                               const ProtocolParams& p);

// Attempt rate of node j as perceived by a listener that discounts the CCA
// failures j suffers from nodes the listener cannot hear.
double perceived_rate(double beta_j, double b_j, double q_j,
                      double alpha_hidden);

// Probability that a CCA failure of node j is caused only by transmitters
// the observer i cannot hear.  sum_tau_hidden sums tau_seen of j over
// omega_j minus (omega_i + i); sum_tau_omega over all of omega_j.
double hidden_blocking(double sum_tau_hidden, double sum_tau_omega,
                       double beta_j, double c_j, double t_eff_j,
                       double t_tx);

// CCA-busy probability of a node whose blocked time is dilated to t_eff.
double cca_failure(double eta, double c, double beta, double t_eff);

struct CollisionInputs {
  double eta, c, beta;
  double sum_tau_omega;    // perceived rates over the whole CS set
  double sum_tau_c1;       // perceived rates over interferers the node hears
  double sum_tau_c2_unc;   // unconditioned rates of hidden interferers
  double prod_h_c2;        // probability every hidden interferer is silent
};
// Probability that a transmission that leaves the MAC collides at the
// receiver.
double collision_probability(const CollisionInputs& in,
                             const ProtocolParams& p);

// ---- solver ----

FixedPointResult solve(const NetworkModel& m, const Neighborhoods& nb,
                       const ProtocolParams& p, const AnalysisConfig& cfg);

enum class StabilityBand { kStable, kMarginal, kUnstable };

struct StabilityReport {
  double sum_q = 0.0;
  StabilityBand band = StabilityBand::kStable;
  std::string message;
};

// Single-channel saturation heuristic over a mutually-interfering region:
// total utilization under 0.9 is trusted, [0.9, 1) is marginal, 1 or more
// means the analysis output is extrapolation.
StabilityReport stability_check(const FixedPointResult& r);

}  // namespace wpan
