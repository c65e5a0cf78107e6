#include "wpan/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wpan/teff.hpp"
#include "wpan/units.hpp"

namespace wpan {

ContentionView contention_view(double beta, double sum_tau,
                               const ProtocolParams& p) {
  if (beta <= 0.0) throw std::domain_error("contention_view: beta must be positive");
  if (sum_tau < 0.0) throw std::domain_error("contention_view: negative rate sum");
  ContentionView v;
  v.eta = beta / (beta + sum_tau);
  v.g = 1.0 / (beta + sum_tau);
  v.c = 1.0 - std::exp(-static_cast<double>(p.turnaround_symbols) * beta);
  return v;
}

double perceived_rate(double beta_j, double b_j, double q_j,
                      double alpha_hidden) {
  const double denom = 1.0 - q_j + q_j * b_j;
  if (denom <= 0.0)
    throw std::domain_error(
        "perceived_rate: saturated node with no backoff share (1-q+qb <= 0)");
  return beta_j * b_j * q_j * (1.0 - alpha_hidden) / denom;
}

double hidden_blocking(double sum_tau_hidden, double sum_tau_omega,
                       double beta_j, double c_j, double t_eff_j,
                       double t_tx) {
  if (sum_tau_hidden <= 0.0) return 0.0;
  const double eta_j = beta_j / (beta_j + sum_tau_omega);
  const double num = sum_tau_hidden / (beta_j + sum_tau_omega) *
                     (1.0 - c_j) * beta_j * t_tx;
  const double den = eta_j + (1.0 - eta_j) * c_j +
                     (1.0 - eta_j) * (1.0 - c_j) * beta_j * t_eff_j;
  return num / den;
}

double cca_failure(double eta, double c, double beta, double t_eff) {
  const double busy = (1.0 - eta) * (1.0 - c) * beta * t_eff;
  return busy / (eta + (1.0 - eta) * c + busy);
}

double collision_probability(const CollisionInputs& in,
                             const ProtocolParams& p) {
  const double t_tx = p.tx_period();
  const double eta = in.eta, c = in.c;
  const double denom_omega = in.beta + in.sum_tau_omega;
  // Probability that neither a heard interferer that sneaked in during the
  // turnaround window nor a hidden interferer overlaps the frame.
  const double clear = std::exp(-static_cast<double>(p.turnaround_symbols) *
                                in.sum_tau_c1) *
                       std::exp(-t_tx * in.sum_tau_c2_unc);
  const double r1 = eta * (1.0 - in.prod_h_c2);
  const double r2 = (1.0 - eta) * c * (1.0 - in.prod_h_c2);
  const double r3 = eta * in.prod_h_c2 * (1.0 - clear);
  const double r4 = in.sum_tau_c1 / denom_omega * c * in.prod_h_c2;
  const double r5 = (in.sum_tau_omega - in.sum_tau_c1) / denom_omega * c *
                    in.prod_h_c2 * (1.0 - clear);
  const double access = eta + (1.0 - eta) * c;
  return (r1 + r2 + r3 + r4 + r5) / access;
}

namespace {

struct FieldRef {
  const char* name;
  double NodeUnknowns::*ptr;
  double lo, hi;  // validity range (hi may be inf)
};

const double kInf = std::numeric_limits<double>::infinity();

// Fields blended by the damping step, with their admissible ranges.
const FieldRef kFields[] = {
    {"alpha", &NodeUnknowns::alpha, 0.0, 1.0},
    {"gamma", &NodeUnknowns::gamma, 0.0, 1.0},
    {"p", &NodeUnknowns::p, 0.0, 1.0},
    {"delta", &NodeUnknowns::delta, 0.0, 1.0},
    {"hop_loss", &NodeUnknowns::hop_loss, 0.0, 1.0},
    {"q", &NodeUnknowns::q, 0.0, kInf},  // upper bound handled via clamp_q
    {"b", &NodeUnknowns::b, 0.0, 1.0},
    {"beta", &NodeUnknowns::beta, 0.0, kInf},
    {"b_bar", &NodeUnknowns::b_bar, 0.0, kInf},
    {"c", &NodeUnknowns::c, 0.0, 1.0},
    {"eta", &NodeUnknowns::eta, 0.0, 1.0},
    {"sigma", &NodeUnknowns::sigma, 0.0, kInf},
    {"nu", &NodeUnknowns::nu, 0.0, kInf},
    {"theta", &NodeUnknowns::theta, 0.0, kInf},
    {"t_eff", &NodeUnknowns::t_eff, 0.0, kInf},
};

[[noreturn]] void fail(int iter, int node_id, const std::string& what) {
  std::ostringstream os;
  os << "fixed-point solver failed at iteration " << iter << ", node "
     << node_id << ": " << what;
  throw SolverError(os.str());
}

// Snap floating dust onto the admissible range; real violations throw.
double snap(double v, double lo, double hi, int iter, int node_id,
            const char* name) {
  const double eps = 1e-9;
  if (!std::isfinite(v)) fail(iter, node_id, std::string(name) + " is not finite");
  if (v < lo) {
    if (v > lo - eps) return lo;
    fail(iter, node_id, std::string(name) + "=" + std::to_string(v) + " below " +
                            std::to_string(lo));
  }
  if (v > hi) {
    if (v < hi + eps) return hi;
    fail(iter, node_id, std::string(name) + "=" + std::to_string(v) + " above " +
                            std::to_string(hi));
  }
  return v;
}

}  // namespace

FixedPointResult solve(const NetworkModel& m, const Neighborhoods& nb,
                       const ProtocolParams& p, const AnalysisConfig& cfg) {
  require_valid(p);
  const int n = m.size();
  const double t_tx = p.tx_period();
  const bool no_hidden = nb.hidden_free();
  if (cfg.damping <= 0.0 || cfg.damping > 1.0)
    throw std::invalid_argument("solve: damping must be in (0,1]");

  // Position of each dense index inside omega[i], -1 when absent.
  std::vector<std::vector<int>> pos(n, std::vector<int>(n, -1));
  for (int i = 0; i < n; ++i)
    for (size_t k = 0; k < nb.omega[i].size(); ++k)
      pos[i][nb.omega[i][k]] = static_cast<int>(k);

  std::vector<double> lambda(n, 0.0);
  for (int i = 0; i < n; ++i) lambda[i] = units::pps_to_per_symbol(m.nodes[i].lambda_pps);

  // ---- initial state ----
  std::vector<NodeUnknowns> st(n);
  const double tau0 = units::pps_to_per_symbol(cfg.init_tau_pps);
  for (int i = 0; i < n; ++i) {
    NodeUnknowns& u = st[i];
    u.tau_seen.assign(nb.omega[i].size(), 0.0);
    if (i == nb.bs) continue;
    const double l = m.nodes[i].link_per;
    ServiceDiscard sd = service_and_discard(0.0, l, p);
    u.alpha = 0.0;
    u.p = 0.0;
    u.gamma = l;
    u.delta = sd.delta;
    u.hop_loss = sd.hop_loss;
    u.b = sd.b;
    u.beta = sd.beta;
    u.b_bar = sd.b_bar;
    u.sigma = sd.sigma;
    u.nu = lambda[i];
    u.theta = u.nu * (1.0 - u.hop_loss);
    u.q = std::min(u.nu / u.sigma, 1.0);
    u.c = 1.0 - std::exp(-static_cast<double>(p.turnaround_symbols) * u.beta);
    u.eta = 1.0;
    u.t_eff = t_tx;
    u.h_bar = 1.0 - u.q + u.q * u.b;
    u.tau_uncond = perceived_rate(u.beta, u.b, u.q, u.alpha);
    for (size_t k = 0; k < nb.omega[i].size(); ++k)
      u.tau_seen[k] = (nb.omega[i][k] == nb.bs) ? 0.0 : tau0;
  }
  // The BS never contends: zero rates, always silent.
  st[nb.bs].h_bar = 1.0;

  FixedPointResult out;
  out.nodes = st;

  std::vector<NodeUnknowns> nx = st;
  std::vector<double> sum_tau_prev(n, 0.0), sum_tau_new(n, 0.0);

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const std::vector<NodeUnknowns>& S = out.nodes;
    nx = S;

    for (int i = 0; i < n; ++i) {
      sum_tau_prev[i] = 0.0;
      for (double t : S[i].tau_seen) sum_tau_prev[i] += t;
    }

    // Stage A: per-attempt backoff machinery from the previous alpha/gamma.
    for (int i = 0; i < n; ++i) {
      if (i == nb.bs) continue;
      ServiceDiscard sd = service_and_discard(S[i].alpha, S[i].gamma, p);
      nx[i].b_bar = sd.b_bar;
      nx[i].beta = sd.beta;
      nx[i].b = sd.b;
      ContentionView v = contention_view(nx[i].beta, sum_tau_prev[i], p);
      nx[i].c = v.c;  // eta refreshed after the new rates are known
    }

    // Stage B: perceived attempt rates for every listener/neighbor pair.
    for (int i = 0; i < n; ++i) {
      if (i == nb.bs) continue;
      for (size_t k = 0; k < nb.omega[i].size(); ++k) {
        const int j = nb.omega[i][k];
        if (j == nb.bs) {
          nx[i].tau_seen[k] = 0.0;
          continue;
        }
        double hidden = 0.0;
        for (size_t kk = 0; kk < nb.omega[j].size(); ++kk) {
          const int other = nb.omega[j][kk];
          if (other != i && !nb.in_omega[i][other])
            hidden += S[j].tau_seen[kk];
        }
        const double a_hidden =
            hidden_blocking(hidden, sum_tau_prev[j], nx[j].beta, nx[j].c,
                            S[j].t_eff, t_tx);
        nx[i].tau_seen[k] =
            perceived_rate(nx[j].beta, nx[j].b, S[j].q, a_hidden);
      }
    }
    for (int i = 0; i < n; ++i) {
      sum_tau_new[i] = 0.0;
      for (double t : nx[i].tau_seen) sum_tau_new[i] += t;
    }

    // Stage C: channel-busy dilation and the new CCA-busy probability.
    for (int i = 0; i < n; ++i) {
      if (i == nb.bs) continue;
      if (no_hidden || sum_tau_new[i] <= 0.0) {
        nx[i].t_eff = t_tx;
      } else if (cfg.teff_model == TeffModel::kMdInfinity) {
        nx[i].t_eff = teff_md_infinity(sum_tau_new[i], t_tx);
      } else {
        const int deg = static_cast<int>(nb.omega[i].size());
        std::vector<std::vector<char>> conflict(deg, std::vector<char>(deg, 0));
        for (int a = 0; a < deg; ++a)
          for (int b2 = 0; b2 < deg; ++b2)
            conflict[a][b2] = nb.in_omega[nb.omega[i][a]][nb.omega[i][b2]];
        nx[i].t_eff = teff_boorstyn(nx[i].beta, nx[i].tau_seen, conflict, t_tx);
      }
      ContentionView v = contention_view(nx[i].beta, sum_tau_new[i], p);
      nx[i].eta = v.eta;
      nx[i].alpha = cca_failure(nx[i].eta, nx[i].c, nx[i].beta, nx[i].t_eff);
    }

    // Stage D: collision probability toward each node's receiver.
    for (int i = 0; i < n; ++i) {
      if (i == nb.bs) continue;
      CollisionInputs in;
      in.eta = nx[i].eta;
      in.c = nx[i].c;
      in.beta = nx[i].beta;
      in.sum_tau_omega = sum_tau_new[i];
      in.sum_tau_c1 = 0.0;
      for (int j : nb.c1[i]) in.sum_tau_c1 += nx[i].tau_seen[pos[i][j]];
      in.prod_h_c2 = 1.0;
      in.sum_tau_c2_unc = 0.0;
      for (int j : nb.c2[i]) {
        if (j == nb.bs) continue;
        const double h_j = 1.0 - S[j].q + S[j].q * nx[j].b;
        in.prod_h_c2 *= std::max(0.0, h_j);
        in.sum_tau_c2_unc +=
            perceived_rate(nx[j].beta, nx[j].b, S[j].q, nx[j].alpha);
      }
      nx[i].p = collision_probability(in, p);
      nx[i].gamma = nx[i].p + (1.0 - nx[i].p) * m.nodes[i].link_per;
    }

    // Stage E: head-of-line service and discard from the new alpha/gamma.
    for (int i = 0; i < n; ++i) {
      if (i == nb.bs) continue;
      ServiceDiscard sd = service_and_discard(nx[i].alpha, nx[i].gamma, p);
      nx[i].sigma = sd.sigma;
      nx[i].delta = sd.delta;
      nx[i].hop_loss = sd.hop_loss;
    }

    // Stage F: traffic flowing up the tree and the queue utilization.
    for (int i = 0; i < n; ++i) {
      if (i == nb.bs) continue;
      double nu = lambda[i];
      for (int ch : nb.children[i]) nu += S[ch].theta;
      nx[i].nu = nu;
      nx[i].theta = nu * (1.0 - nx[i].hop_loss);
      double q = nu / nx[i].sigma;
      if (cfg.clamp_q) q = std::min(q, 1.0);
      nx[i].q = q;
    }

    // Damping, range checks, residual over the applied change.
    double residual = 0.0;
    const double d = cfg.damping;
    for (int i = 0; i < n; ++i) {
      if (i == nb.bs) continue;
      NodeUnknowns& prev = out.nodes[i];
      NodeUnknowns cur = prev;
      for (const FieldRef& f : kFields) {
        const double q_hi = cfg.clamp_q ? 1.0 : kInf;
        const double hi = (f.ptr == &NodeUnknowns::q) ? q_hi : f.hi;
        double v = prev.*(f.ptr) + d * (nx[i].*(f.ptr) - prev.*(f.ptr));
        v = snap(v, f.lo, hi, iter, m.nodes[i].id, f.name);
        const double delta_v = std::fabs(v - prev.*(f.ptr));
        residual = std::max(residual, delta_v / std::max(std::fabs(v), 1e-12));
        cur.*(f.ptr) = v;
      }
      for (size_t k = 0; k < cur.tau_seen.size(); ++k) {
        double v = prev.tau_seen[k] + d * (nx[i].tau_seen[k] - prev.tau_seen[k]);
        v = snap(v, 0.0, kInf, iter, m.nodes[i].id, "tau_seen");
        const double delta_v = std::fabs(v - prev.tau_seen[k]);
        residual = std::max(residual, delta_v / std::max(std::fabs(v), 1e-12));
        cur.tau_seen[k] = v;
      }
      // Views derived from the damped primitives.
      cur.h_bar = snap(1.0 - cur.q + cur.q * cur.b, 0.0, 1.0, iter,
                       m.nodes[i].id, "h_bar");
      cur.tau_uncond = perceived_rate(cur.beta, cur.b, cur.q, cur.alpha);
      prev = cur;
    }

    out.iterations = iter;
    out.residual = residual;
    if (residual <= cfg.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

StabilityReport stability_check(const FixedPointResult& r) {
  StabilityReport rep;
  for (const auto& u : r.nodes) rep.sum_q += u.q;
  std::ostringstream os;
  if (rep.sum_q < 0.9) {
    rep.band = StabilityBand::kStable;
    os << "total utilization " << rep.sum_q << " < 0.9: operating point trusted";
  } else if (rep.sum_q < 1.0) {
    rep.band = StabilityBand::kMarginal;
    os << "total utilization " << rep.sum_q
       << " in [0.9,1): close to saturation, treat results with care";
  } else {
    rep.band = StabilityBand::kUnstable;
    os << "total utilization " << rep.sum_q
       << " >= 1: network is saturated, analysis output is extrapolation";
  }
  rep.message = os.str();
  return rep;
}

}  // namespace wpan
