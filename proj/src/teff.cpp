#include "wpan/teff.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace wpan {

double teff_md_infinity(double zeta, double t_tx) {
  if (zeta < 0.0) throw std::domain_error("teff_md_infinity: negative rate");
  const double x = zeta * t_tx;
  if (x < 1e-8) {
    // (e^x - 1)/zeta = t_tx (1 + x/2 + x^2/6 + ...)
    return t_tx * (1.0 + x / 2.0 + x * x / 6.0);
  }
  return std::expm1(x) / zeta;
}

namespace {

struct IsetCtx {
  const std::vector<double>* w;
  const std::vector<uint32_t>* closed_nb;  // neighbor mask including self
};

// Sum over independent sets contained in `mask` of the product of vertex
// weights; the empty set contributes 1.
double iset_sum(uint32_t mask, const IsetCtx& ctx) {
  if (!mask) return 1.0;
  const int v = __builtin_ctz(mask);
  const uint32_t without = mask & (mask - 1);  // drop lowest bit
  double total = iset_sum(without, ctx);       // v excluded
  total += (*ctx.w)[v] * iset_sum(mask & ~(*ctx.closed_nb)[v], ctx);
  return total;
}

}  // namespace

double teff_boorstyn(double beta, const std::vector<double>& tau,
                     const std::vector<std::vector<char>>& conflict,
                     double t_tx) {
  const int m = static_cast<int>(tau.size());
  if (m > 25)
    throw std::invalid_argument(
        "teff_boorstyn: neighborhood too large for independent-set "
        "enumeration (" + std::to_string(m) + " > 25)");
  if (m == 0) return t_tx;

  double sum_tau = 0.0;
  for (double t : tau) sum_tau += t;
  if (sum_tau <= 0.0) return t_tx;

  std::vector<double> w(m);
  std::vector<uint32_t> closed_nb(m);
  for (int j = 0; j < m; ++j) {
    w[j] = tau[j] * t_tx;
    uint32_t nb = 1u << j;
    for (int k = 0; k < m; ++k)
      if (k != j && conflict[j][k]) nb |= 1u << k;
    closed_nb[j] = nb;
  }

  IsetCtx ctx{&w, &closed_nb};
  // Occupancy states of the clique around the tagged node: any independent
  // set of neighbors, optionally the tagged node alone (it conflicts with
  // everyone).  Inverse idle probability:
  const double inv_idle = beta * t_tx + iset_sum((1u << m) - 1u, ctx);

  // Mean cycle: idle gap + busy period; busy periods start at total rate
  // beta + sum_tau, a share beta/(beta+sum_tau) of them are the tagged
  // node's own transmissions of length t_tx.
  const double t_eff = (inv_idle - 1.0 - beta * t_tx) / sum_tau;
  return t_eff < t_tx ? t_tx : t_eff;
}

}  // namespace wpan
