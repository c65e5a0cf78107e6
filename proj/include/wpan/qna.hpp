#pragma once

#include <vector>

#include "wpan/fixed_point.hpp"
#include "wpan/network.hpp"
#include "wpan/protocol.hpp"

// End-to-end delay and delivery probability via two-moment queueing
// network decomposition: each node is a GI/G/1 station whose service time
// is the MAC head-of-line time, departure streams feed the parent.

namespace wpan {

// Laplace transform E[e^(-z S)] of the head-of-line service time of a node
// with CCA attempt rate beta, CCA-busy probability alpha and transmission
// failure probability gamma (unbounded retransmissions).
double service_lst(double z, double beta, double alpha, double gamma,
                   double t_tx);

struct ServiceMoments {
  double e_s;    // mean service time, symbols
  double e_s2;   // second moment
  double c_s2;   // squared coefficient of variation
};

// Closed-form first two moments of the same distribution.  Requires
// beta > 0, 0 <= alpha < 1, 0 <= gamma < 1.
ServiceMoments service_moments(double beta, double alpha, double gamma,
                               double t_tx);

struct QnaNode {
  double lambda_total = 0.0;  // total arrival rate (per symbol)
  double e_s = 0.0;
  double c_s2 = 0.0;
  double rho = 0.0;           // utilization lambda_total * e_s
  double c_a2 = 1.0;          // arrival-stream variability
  double c_d2 = 1.0;          // departure-stream variability
  double sojourn = 0.0;       // mean wait + service, symbols; inf if rho >= 1
  bool overloaded = false;
};

struct SourceDelay {
  int node_id = 0;
  double delay_symbols = 0.0;  // generation to BS arrival; inf when any
                               // station on the path is overloaded
  double p_delivery = 1.0;     // survives every hop's loss
};

struct QnaReport {
  std::vector<QnaNode> nodes;       // dense-indexed, BS entry inert
  std::vector<SourceDelay> sources; // one entry per node with lambda > 0
  bool any_overloaded = false;
};

QnaReport qna_delay(const NetworkModel& m, const Neighborhoods& nb,
                    const FixedPointResult& fp, const ProtocolParams& p);

}  // namespace wpan
