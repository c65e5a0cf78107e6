#include "wpan/qna.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wpan/units.hpp"

namespace wpan {

double service_lst(double z, double beta, double alpha, double gamma,
                   double t_tx) {
  const double a = beta * (1.0 - alpha);
  const double e = std::exp(-z * t_tx);
  return a * (1.0 - gamma) * e / (z + a * (1.0 - gamma * e));
}

ServiceMoments service_moments(double beta, double alpha, double gamma,
                               double t_tx) {
  if (beta <= 0.0) throw std::domain_error("service_moments: beta must be positive");
  if (!(alpha >= 0.0) || alpha >= 1.0)
    throw std::domain_error("service_moments: alpha must be in [0,1)");
  if (!(gamma >= 0.0) || gamma >= 1.0)
    throw std::domain_error("service_moments: gamma must be in [0,1) "
                            "(service time diverges at gamma = 1)");
  const double a = beta * (1.0 - alpha);
  ServiceMoments sm;
  sm.e_s = (1.0 + a * t_tx) / (a * (1.0 - gamma));
  sm.e_s2 = (a * t_tx * t_tx + 2.0 * sm.e_s * (1.0 + a * gamma * t_tx)) /
            (a * (1.0 - gamma));
  sm.c_s2 = sm.e_s2 / (sm.e_s * sm.e_s) - 1.0;
  return sm;
}

QnaReport qna_delay(const NetworkModel& m, const Neighborhoods& nb,
                    const FixedPointResult& fp, const ProtocolParams& p) {
  const int n = m.size();
  const double t_tx = p.tx_period();
  const double inf = std::numeric_limits<double>::infinity();
  QnaReport rep;
  rep.nodes.assign(n, {});

  // Leaf-to-root: children are finished before their parent, so each
  // node's arrival stream can be assembled from external traffic plus the
  // children's departure processes.
  for (int i : nb.order_leaf_to_root) {
    const NodeUnknowns& u = fp.nodes[i];
    QnaNode& qn = rep.nodes[i];
    const double lambda_ext = units::pps_to_per_symbol(m.nodes[i].lambda_pps);

    qn.lambda_total = lambda_ext;
    double weighted_c2 = lambda_ext * 1.0;  // external arrivals are Poisson
    for (int ch : nb.children[i]) {
      const double rate_ch = fp.nodes[ch].theta;
      qn.lambda_total += rate_ch;
      weighted_c2 += rate_ch * rep.nodes[ch].c_d2;
    }
    qn.c_a2 = qn.lambda_total > 0.0 ? weighted_c2 / qn.lambda_total : 1.0;

    if (u.gamma >= 1.0) {
      qn.overloaded = true;
      qn.sojourn = inf;
      qn.c_d2 = 1.0;
      rep.any_overloaded = true;
      continue;
    }
    ServiceMoments sm = service_moments(u.beta, u.alpha, u.gamma, t_tx);
    qn.e_s = sm.e_s;
    qn.c_s2 = sm.c_s2;
    qn.rho = qn.lambda_total * sm.e_s;

    if (qn.rho >= 1.0) {
      qn.overloaded = true;
      qn.sojourn = inf;
      // Saturated server departures look like the service process.
      qn.c_d2 = (1.0 - u.delta) * qn.c_s2;
      rep.any_overloaded = true;
      continue;
    }
    qn.sojourn = qn.rho * sm.e_s * (qn.c_a2 + qn.c_s2) /
                     (2.0 * (1.0 - qn.rho)) +
                 sm.e_s;
    const double rho2 = qn.rho * qn.rho;
    qn.c_d2 = (1.0 - u.delta) *
              (1.0 + rho2 * (qn.c_s2 - 1.0) + (1.0 - rho2) * (qn.c_a2 - 1.0));
  }

  for (int i = 0; i < n; ++i) {
    if (i == nb.bs || m.nodes[i].lambda_pps <= 0.0) continue;
    SourceDelay sd;
    sd.node_id = m.nodes[i].id;
    sd.delay_symbols = 0.0;
    sd.p_delivery = 1.0;
    for (int cur = i; cur != nb.bs; cur = nb.parent[cur]) {
      sd.delay_symbols += rep.nodes[cur].sojourn;
      sd.p_delivery *= 1.0 - fp.nodes[cur].hop_loss;
    }
    rep.sources.push_back(sd);
  }
  return rep;
}

}  // namespace wpan
