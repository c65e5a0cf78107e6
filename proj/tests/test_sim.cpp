#include <doctest.h>

#include <cmath>

#include "wpan/fixed_point.hpp"
#include "wpan/rng.hpp"
#include "wpan/scenario_gen.hpp"
#include "wpan/sim.hpp"
#include "wpan/units.hpp"

using namespace wpan;

namespace {

struct Prepared {
  NetworkModel m;
  Neighborhoods nb;
};

Prepared prep(NetworkModel m) {
  Neighborhoods nb = derive_neighborhoods(m);
  return {std::move(m), std::move(nb)};
}

NetworkModel isolated(double lambda, double per) {
  NetworkModel m;
  m.bs_id = 0;
  m.nodes = {{0, 0.0, 0.0, NodeRole::kBs, 0.0, 0.0},
             {1, 5.0, 0.0, NodeRole::kSource, lambda, per}};
  m.parent = {{1, 0}};
  m.cs_range_m = 10.0;
  return m;
}

// j and k hear each other iff `audible`; both talk to the BS.
NetworkModel pair_to_bs(double lambda, double per, bool audible) {
  NetworkModel m;
  m.bs_id = 0;
  m.nodes = {{0, 0.0, 0.0, NodeRole::kBs, 0.0, 0.0},
             {1, 8.0, 0.0, NodeRole::kSource, lambda, per},
             {2, -8.0, 0.0, NodeRole::kSource, lambda, per}};
  m.parent = {{1, 0}, {2, 0}};
  if (audible)
    m.explicit_cs = {{{0, {1, 2}}, {1, {0, 2}}, {2, {0, 1}}}};
  else
    m.explicit_cs = {{{0, {1, 2}}, {1, {0}}, {2, {0}}}};
  return m;
}

}  // namespace

TEST_CASE("an isolated clean node never fails at anything") {
  const Prepared t = prep(isolated(2.0, 0.0));
  SimConfig cfg;
  cfg.duration_s = 200.0;
  cfg.warmup_s = 10.0;
  const SimRun run = simulate_once(t.m, t.nb, ProtocolParams{}, cfg, 7);
  const NodeCounters& n = run.nodes[1];
  CHECK(n.cca_attempts > 0);
  CHECK(n.cca_busy == 0);
  CHECK(n.tx_failures == 0);
  CHECK(n.discards == 0);
  CHECK(n.max_ccas_per_attempt == 1);
  CHECK(n.max_tx_per_packet == 1);
  CHECK(run.sources[1].dropped == 0);
  CHECK(run.sources[1].p_del_hat() == 1.0);
}

TEST_CASE("zero-load delay equals one backoff, CCA, turnaround and airtime") {
  const ProtocolParams p;
  const Prepared t = prep(isolated(0.05, 0.0));
  SimConfig cfg;
  cfg.duration_s = 2000.0;
  cfg.warmup_s = 10.0;
  cfg.reps = 8;
  const SimAggregate agg = replicate(t.m, t.nb, p, cfg);
  // 70 (mean first backoff) + 8 (CCA) + 12 (turnaround) + T_tx.
  const double expect_ms = units::symbols_to_ms(70.0 + 8.0 + 12.0 + 294.0);
  const MeanCi d = agg.sources[1].delay_ms;
  CHECK(std::abs(d.mean - expect_ms) <= d.ci95);
}

TEST_CASE("packet conservation holds exactly per source") {
  const Scenario sc = gen_tree_scenario(10, 3.0, 0.02, 2.0, 31);
  const Prepared t = prep(sc.model);
  SimConfig cfg;
  cfg.duration_s = 150.0;
  cfg.warmup_s = 0.0;  // with no clipping the balance must be exact
  const SimRun run = simulate_once(t.m, t.nb, sc.protocol, cfg, 3);
  int64_t total_gen = 0;
  for (int i = 0; i < t.m.size(); ++i) {
    const SourceCounters& s = run.sources[i];
    CHECK(s.generated == s.delivered + s.dropped + s.in_flight);
    total_gen += s.generated;
  }
  CHECK(total_gen > 0);
}

TEST_CASE("seeded runs are reproducible and seeds matter") {
  const Scenario sc = gen_tree_scenario(8, 3.0, 0.01, 1.0, 17);
  const Prepared t = prep(sc.model);
  SimConfig cfg;
  cfg.duration_s = 60.0;
  cfg.warmup_s = 5.0;
  const SimRun a = simulate_once(t.m, t.nb, sc.protocol, cfg, 11);
  const SimRun b = simulate_once(t.m, t.nb, sc.protocol, cfg, 11);
  const SimRun c = simulate_once(t.m, t.nb, sc.protocol, cfg, 12);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < t.m.size(); ++i) {
    all_equal &= a.nodes[i].cca_attempts == b.nodes[i].cca_attempts &&
                 a.nodes[i].tx_count == b.nodes[i].tx_count &&
                 a.sources[i].delivered == b.sources[i].delivered &&
                 a.sources[i].delay_sum_symbols == b.sources[i].delay_sum_symbols;
    any_diff |= a.nodes[i].cca_attempts != c.nodes[i].cca_attempts;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("one replication equals the underlying single run") {
  const Scenario sc = gen_tree_scenario(6, 3.0, 0.01, 1.0, 23);
  const Prepared t = prep(sc.model);
  SimConfig cfg;
  cfg.duration_s = 80.0;
  cfg.warmup_s = 5.0;
  cfg.reps = 1;
  cfg.seed = 99;
  const SimAggregate agg = replicate(t.m, t.nb, sc.protocol, cfg);
  const SimRun run =
      simulate_once(t.m, t.nb, sc.protocol, cfg, mix_seed(99, 0));
  for (int i = 0; i < t.m.size(); ++i) {
    CHECK(agg.nodes[i].alpha.mean == run.nodes[i].alpha_hat());
    if (run.sources[i].generated || run.sources[i].delivered)
      CHECK(agg.sources[i].p_del.mean == run.sources[i].p_del_hat());
  }
}

TEST_CASE("MAC never exceeds its CCA and retry budgets") {
  // A congested star forces deep backoff stages and retries.
  const Scenario sc = gen_star_scenario(8, 5, 0.05, 20.0);
  const Prepared t = prep(sc.model);
  SimConfig cfg;
  cfg.duration_s = 120.0;
  cfg.warmup_s = 5.0;
  const ProtocolParams p;
  const SimRun run = simulate_once(t.m, t.nb, p, cfg, 5);
  bool saw_retry = false;
  for (int i = 0; i < t.m.size(); ++i) {
    CHECK(run.nodes[i].max_ccas_per_attempt <= p.cca_attempts());
    CHECK(run.nodes[i].max_tx_per_packet <= p.transmissions());
    saw_retry |= run.nodes[i].max_tx_per_packet > 1;
  }
  CHECK(saw_retry);
}

TEST_CASE("without acknowledgements a loss is not a MAC discard") {
  // Mutually hidden pair: the channel never reads busy, so CCA exhaustion
  // is impossible and any discard could only come from mislabeled losses.
  const Prepared t = prep(pair_to_bs(20.0, 0.15, false));
  ProtocolParams p;
  p.acks_enabled = false;
  SimConfig cfg;
  cfg.duration_s = 150.0;
  cfg.warmup_s = 5.0;
  const SimRun run = simulate_once(t.m, t.nb, p, cfg, 13);
  const NodeCounters& n = run.nodes[1];
  CHECK(n.tx_failures > 0);           // link errors do strike
  CHECK(n.max_tx_per_packet == 1);    // but nobody retries
  CHECK(run.sources[1].dropped > 0);  // losses reach the bookkeeping
  CHECK(n.discards == 0);             // as losses, not MAC discards
  CHECK(run.sources[1].p_del_hat() < 1.0);
}

TEST_CASE("audible saturated pair collides like the analysis predicts") {
  // Only simultaneous-sensing collisions are possible here (PER 0, both
  // stations audible).  Saturation keeps both queues busy.
  const Prepared t = prep(pair_to_bs(60.0, 0.0, true));
  const ProtocolParams p;
  SimConfig cfg;
  cfg.duration_s = 300.0;
  cfg.warmup_s = 20.0;
  const SimRun run = simulate_once(t.m, t.nb, p, cfg, 29);

  const FixedPointResult fp =
      solve(t.m, t.nb, p, AnalysisConfig{});
  REQUIRE(fp.converged);
  const double sim_gamma = run.nodes[1].gamma_hat();
  CHECK(sim_gamma > 0.0);
  CHECK(fp.nodes[1].p > 0.0);
  // Retries of a collided pair restart their backoffs together and often
  // collide again; the per-attempt independence of the analysis cannot see
  // that, so only order-of-magnitude agreement is demanded here.  The
  // banded model-vs-simulation comparison covers the end-to-end metrics.
  const double ratio = sim_gamma / fp.nodes[1].p;
  CHECK(ratio > 1.0 / 3.0);
  CHECK(ratio < 3.0);
}

TEST_CASE("hidden pair suffers, audible pair mostly defers") {
  const ProtocolParams p;
  SimConfig cfg;
  cfg.duration_s = 200.0;
  cfg.warmup_s = 10.0;
  const Prepared hid = prep(pair_to_bs(8.0, 0.0, false));
  const Prepared aud = prep(pair_to_bs(8.0, 0.0, true));
  const SimRun a = simulate_once(hid.m, hid.nb, p, cfg, 41);
  const SimRun b = simulate_once(aud.m, aud.nb, p, cfg, 41);
  CHECK(a.nodes[1].gamma_hat() > 3 * b.nodes[1].gamma_hat());
  CHECK(b.nodes[1].alpha_hat() > a.nodes[1].alpha_hat());
}

TEST_CASE("pair counters estimate the perceived attempt rate") {
  // Chain k - j - i - BS: i hears j but not k, so k alone can block j's
  // CCAs invisibly to i.
  NetworkModel m;
  m.bs_id = 0;
  m.nodes = {{0, 30.0, 0.0, NodeRole::kBs, 0.0, 0.0},
             {3, 0.0, 0.0, NodeRole::kSource, 4.0, 0.0},    // k
             {2, 10.0, 0.0, NodeRole::kSource, 4.0, 0.0},   // j
             {1, 20.0, 0.0, NodeRole::kSource, 4.0, 0.0}};  // i
  m.parent = {{3, 2}, {2, 1}, {1, 0}};
  m.cs_range_m = 12.0;
  REQUIRE(validate(m).empty());
  const Prepared t = prep(m);
  const ProtocolParams p;

  SimConfig cfg;
  cfg.duration_s = 1000.0;
  cfg.warmup_s = 20.0;
  cfg.record_pair_stats = true;

  const int j = t.nb.index_of.at(2), i = t.nb.index_of.at(1);
  double attempts = 0.0, hidden_only = 0.0, nontx = 0.0;
  for (uint64_t rep = 0; rep < 4; ++rep) {
    const SimRun run = simulate_once(t.m, t.nb, p, cfg, mix_seed(4242, rep));
    attempts += static_cast<double>(run.nodes[j].cca_attempts);
    hidden_only += static_cast<double>(run.cca_hidden_only[j][i]);
    nontx += static_cast<double>(run.window_symbols - run.nodes[j].tx_symbols);
  }
  const double tau_hat = (attempts - hidden_only) / nontx;

  const FixedPointResult fp = solve(t.m, t.nb, p, AnalysisConfig{});
  REQUIRE(fp.converged);
  // Locate j inside i's CS list to read the perceived rate.
  double tau_model = -1.0;
  for (size_t k = 0; k < t.nb.omega[i].size(); ++k)
    if (t.nb.omega[i][k] == j) tau_model = fp.nodes[i].tau_seen[k];
  REQUIRE(tau_model >= 0.0);
  CHECK(std::abs(tau_hat - tau_model) / tau_hat < 0.10);

  // The invisible-blocking share reconstructs the hidden CCA-failure rate.
  const double alpha_hidden_hat = hidden_only / attempts;
  const NodeUnknowns& uj = fp.nodes[j];
  const double alpha_hidden_model =
      1.0 - tau_model * (1.0 - uj.q + uj.q * uj.b) / (uj.beta * uj.b * uj.q);
  CHECK(std::abs(alpha_hidden_hat - alpha_hidden_model) < 0.05);
}

TEST_CASE("warmup clipping reports the observation window honestly") {
  const Prepared t = prep(isolated(1.0, 0.0));
  SimConfig cfg;
  cfg.duration_s = 100.0;
  cfg.warmup_s = 25.0;
  const SimRun run = simulate_once(t.m, t.nb, ProtocolParams{}, cfg, 1);
  CHECK(run.window_symbols == llround(units::seconds_to_symbols(75.0)));
}
