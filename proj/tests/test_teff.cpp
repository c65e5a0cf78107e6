#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "support/oracles.hpp"
#include "wpan/rng.hpp"
#include "wpan/teff.hpp"

using namespace wpan;

namespace {
constexpr double kTtx = 294.0;
}

TEST_CASE("infinite-server dilation: limits and strict growth") {
  CHECK(teff_md_infinity(0.0, kTtx) == kTtx);
  // Series branch and exp branch agree where they meet.
  const double tiny = 1e-9 / kTtx;
  CHECK(teff_md_infinity(tiny, kTtx) ==
        doctest::Approx(kTtx * (1 + tiny * kTtx / 2)).epsilon(1e-12));
  for (double z : {1e-6, 1e-4, 1e-2}) {
    CHECK(teff_md_infinity(z, kTtx) > kTtx);
  }
  // zeta*T = 1 pins the (e-1)*T point.
  CHECK(teff_md_infinity(1.0 / kTtx, kTtx) ==
        doctest::Approx((std::exp(1.0) - 1.0) * kTtx).epsilon(1e-12));
}

TEST_CASE("infinite-server dilation matches Monte-Carlo busy periods") {
  // Modest sample here; the acceptance suite runs the 1e6-period version.
  const double zeta = 1.0 / kTtx;
  const double mc = oracle::mc_busy_period(zeta, kTtx, 200000, 42);
  CHECK(teff_md_infinity(zeta, kTtx) == doctest::Approx(mc).epsilon(0.01));
}

TEST_CASE("hard-core channel model: one neighbor cannot dilate") {
  const std::vector<double> tau{0.003};
  const std::vector<std::vector<char>> conflict{{0}};
  CHECK(teff_boorstyn(1.0 / 78.0, tau, conflict, kTtx) ==
        doctest::Approx(kTtx).epsilon(1e-12));
}

TEST_CASE("hard-core channel model: two mutually hidden equal neighbors") {
  const double tau = 0.002;
  const std::vector<double> taus{tau, tau};
  // No conflict between them: they can chain transmissions.
  const std::vector<std::vector<char>> conflict{{0, 0}, {0, 0}};
  CHECK(teff_boorstyn(1.0 / 78.0, taus, conflict, kTtx) ==
        doctest::Approx(kTtx * (1.0 + tau * kTtx / 2.0)).epsilon(1e-12));
}

TEST_CASE("hard-core channel model: mutually-heard cluster stays at T_tx") {
  const std::vector<double> taus{0.002, 0.004, 0.001};
  const std::vector<std::vector<char>> conflict{
      {0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  CHECK(teff_boorstyn(1.0 / 78.0, taus, conflict, kTtx) ==
        doctest::Approx(kTtx).epsilon(1e-12));
}

TEST_CASE("hard-core sum matches naive subset enumeration") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_below(7));
    std::vector<double> tau(m);
    for (auto& t : tau) t = rng.uniform01() * 0.004;
    std::vector<std::vector<char>> conflict(m, std::vector<char>(m, 0));
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        conflict[a][b] = conflict[b][a] = rng.bernoulli(0.5);

    const double beta = 1.0 / 78.0;
    double sum_tau = 0.0;
    for (double t : tau) sum_tau += t;
    const double naive = oracle::naive_iset_sum(tau, conflict, kTtx);
    // Reconstruct the dilation from the naive subset sum.
    const double expected =
        std::max(kTtx, (naive - 1.0) / sum_tau);
    CHECK(teff_boorstyn(beta, tau, conflict, kTtx) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("hard-core model never exceeds the infinite-server model") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_below(8));
    std::vector<double> tau(m);
    double sum_tau = 0.0;
    for (auto& t : tau) {
      t = rng.uniform01() * 0.003;
      sum_tau += t;
    }
    std::vector<std::vector<char>> conflict(m, std::vector<char>(m, 0));
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        conflict[a][b] = conflict[b][a] = rng.bernoulli(0.4);
    const double hc = teff_boorstyn(1.0 / 78.0, tau, conflict, kTtx);
    const double inf = teff_md_infinity(sum_tau, kTtx);
    CHECK(hc <= inf * (1 + 1e-12));
  }
}

TEST_CASE("hard-core model rejects oversized neighborhoods") {
  std::vector<double> tau(26, 0.001);
  std::vector<std::vector<char>> conflict(26, std::vector<char>(26, 0));
  CHECK_THROWS_AS(teff_boorstyn(1.0 / 78.0, tau, conflict, kTtx),
                  std::invalid_argument);
}

TEST_CASE("empty neighborhood returns the plain activity period") {
  CHECK(teff_boorstyn(1.0 / 78.0, {}, {}, kTtx) == kTtx);
}
