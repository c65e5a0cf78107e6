#include "wpan/pipeline.hpp"

#include <cmath>

#include "wpan/fixed_point.hpp"
#include "wpan/qna.hpp"
#include "wpan/units.hpp"

namespace wpan {

namespace {

NetworkModel with_rate(const NetworkModel& m, double lambda_pps) {
  NetworkModel out = m;
  if (lambda_pps >= 0.0)
    for (auto& n : out.nodes)
      if (n.role == NodeRole::kSource) n.lambda_pps = lambda_pps;
  return out;
}

const char* stability_name(StabilityBand b) {
  switch (b) {
    case StabilityBand::kStable: return "stable";
    case StabilityBand::kMarginal: return "marginal";
    case StabilityBand::kUnstable: return "unstable";
  }
  return "?";
}

}  // namespace

AnalyzeOutput run_analyze(const Scenario& sc, const std::vector<double>& lambdas) {
  AnalyzeOutput out;
  out.nodes.header = {"lambda_pps", "node",           "alpha",
                      "gamma",      "p",              "delta",
                      "q",          "b",              "beta_per_symbol",
                      "sigma_pps",  "nu_pps",         "theta_pps",
                      "t_eff_symbols", "e_s_symbols", "c_s2",
                      "rho",        "sojourn_ms"};
  out.sources.header = {"lambda_pps", "source", "delay_ms", "p_del"};
  out.summary.header = {"lambda_pps", "converged", "iterations",
                        "residual",   "sum_q",     "stability"};

  std::vector<double> points = lambdas.empty() ? std::vector<double>{-1.0} : lambdas;
  for (double lam : points) {
    NetworkModel m = with_rate(sc.model, lam);
    Neighborhoods nb = derive_neighborhoods(m);
    FixedPointResult fp = solve(m, nb, sc.protocol, sc.analysis);
    if (!fp.converged) out.all_converged = false;
    QnaReport rep = qna_delay(m, nb, fp, sc.protocol);
    StabilityReport st = stability_check(fp);
    if (st.band == StabilityBand::kUnstable) out.any_unstable = true;

    for (int i = 0; i < m.size(); ++i) {
      if (m.nodes[i].id == m.bs_id) continue;
      const NodeUnknowns& u = fp.nodes[i];
      const QnaNode& qn = rep.nodes[i];
      auto& r = out.nodes.add_row();
      r = {fmt_num(lam),
           fmt_num(m.nodes[i].id),
           fmt_num(u.alpha),
           fmt_num(u.gamma),
           fmt_num(u.p),
           fmt_num(u.delta),
           fmt_num(u.q),
           fmt_num(u.b),
           fmt_num(u.beta),
           fmt_num(units::per_symbol_to_pps(u.sigma)),
           fmt_num(units::per_symbol_to_pps(u.nu)),
           fmt_num(units::per_symbol_to_pps(u.theta)),
           fmt_num(u.t_eff),
           fmt_num(qn.e_s),
           fmt_num(qn.c_s2),
           fmt_num(qn.rho),
           fmt_num(std::isinf(qn.sojourn) ? INFINITY
                                          : units::symbols_to_ms(qn.sojourn))};
    }
    for (const auto& src : rep.sources) {
      auto& r = out.sources.add_row();
      r = {fmt_num(lam), fmt_num(src.node_id),
           fmt_num(std::isinf(src.delay_symbols)
                       ? INFINITY
                       : units::symbols_to_ms(src.delay_symbols)),
           fmt_num(src.p_delivery)};
    }
    auto& r = out.summary.add_row();
    r = {fmt_num(lam),        fp.converged ? "1" : "0",
         fmt_num(fp.iterations), fmt_num(fp.residual),
         fmt_num(st.sum_q),   stability_name(st.band)};
  }
  return out;
}

SimulateOutput run_simulate(const Scenario& sc, const std::vector<double>& lambdas,
                            const SimConfig& cfg) {
  SimulateOutput out;
  out.nodes.header = {"lambda_pps", "node", "alpha", "alpha_ci", "gamma",
                      "gamma_ci",   "delta", "delta_ci", "q", "q_ci",
                      "b",          "b_ci"};
  out.sources.header = {"lambda_pps", "source",  "delay_ms", "delay_ms_ci",
                        "p_del",      "p_del_ci"};
  out.summary.header = {"lambda_pps", "reps", "duration_s", "warmup_s",
                        "sum_q",      "sum_q_ci"};

  std::vector<double> points = lambdas.empty() ? std::vector<double>{-1.0} : lambdas;
  Neighborhoods nb = derive_neighborhoods(sc.model);
  for (double lam : points) {
    SimConfig c = cfg;
    if (lam >= 0.0) c.lambda_pps_override = lam;
    SimAggregate agg = replicate(sc.model, nb, sc.protocol, c);
    for (int i = 0; i < sc.model.size(); ++i) {
      if (sc.model.nodes[i].id == sc.model.bs_id) continue;
      const NodeAggregate& na = agg.nodes[i];
      auto& r = out.nodes.add_row();
      r = {fmt_num(lam),          fmt_num(sc.model.nodes[i].id),
           fmt_num(na.alpha.mean), fmt_num(na.alpha.ci95),
           fmt_num(na.gamma.mean), fmt_num(na.gamma.ci95),
           fmt_num(na.delta.mean), fmt_num(na.delta.ci95),
           fmt_num(na.q.mean),     fmt_num(na.q.ci95),
           fmt_num(na.b.mean),     fmt_num(na.b.ci95)};
    }
    for (int i = 0; i < sc.model.size(); ++i) {
      const bool is_source = sc.model.nodes[i].role == NodeRole::kSource &&
                             (lam > 0.0 || sc.model.nodes[i].lambda_pps > 0.0);
      if (!is_source) continue;
      const SourceAggregate& sa = agg.sources[i];
      auto& r = out.sources.add_row();
      r = {fmt_num(lam),            fmt_num(sc.model.nodes[i].id),
           fmt_num(sa.delay_ms.mean), fmt_num(sa.delay_ms.ci95),
           fmt_num(sa.p_del.mean),    fmt_num(sa.p_del.ci95)};
    }
    auto& r = out.summary.add_row();
    r = {fmt_num(lam),           fmt_num(cfg.reps), fmt_num(cfg.duration_s),
         fmt_num(cfg.warmup_s),  fmt_num(agg.sum_q.mean),
         fmt_num(agg.sum_q.ci95)};
  }
  return out;
}

std::string band_label(double rel_err) {
  const double a = std::fabs(rel_err);
  if (a <= 0.10) return "ok";
  if (a <= 0.25) return rel_err > 0 ? "+" : "-";
  return rel_err > 0 ? "++" : "--";
}

CompareOutput run_compare(const Scenario& sc, const std::vector<double>& lambdas,
                          const SimConfig& sim_cfg, double gate_threshold) {
  CompareOutput out;
  out.rows.header = {"lambda_pps", "metric", "id",      "analysis",
                     "sim",        "sim_ci", "rel_err", "band"};
  out.summary.header = {"lambda_pps",      "metric",       "mean_rel_err",
                        "max_abs_rel_err", "band",         "low_discard",
                        "high_rate"};

  std::vector<double> points = lambdas.empty() ? std::vector<double>{-1.0} : lambdas;
  Neighborhoods nb = derive_neighborhoods(sc.model);

  for (double lam : points) {
    NetworkModel m = with_rate(sc.model, lam);
    FixedPointResult fp = solve(m, nb, sc.protocol, sc.analysis);
    if (!fp.converged) out.all_converged = false;
    QnaReport rep = qna_delay(m, nb, fp, sc.protocol);

    SimConfig c = sim_cfg;
    if (lam >= 0.0) c.lambda_pps_override = lam;
    SimAggregate agg = replicate(sc.model, nb, sc.protocol, c);

    double max_delta = 0.0;
    for (int i = 0; i < m.size(); ++i)
      if (m.nodes[i].id != m.bs_id) max_delta = std::max(max_delta, fp.nodes[i].delta);
    const bool low_discard = max_delta <= 0.01;
    const bool high_rate = lam > 2.0;

    struct Acc {
      double sum = 0.0, max_abs = 0.0;
      int n = 0;
    };
    std::map<std::string, Acc> accum;

    auto emit = [&](const std::string& metric, int id, double analysis,
                    double sim, double ci, bool gated) {
      auto& r = out.rows.add_row();
      if (std::fabs(sim) > 1e-9) {
        const double err = (sim - analysis) / sim;
        r = {fmt_num(lam), metric, fmt_num(id), fmt_num(analysis),
             fmt_num(sim), fmt_num(ci), fmt_num(err), band_label(err)};
        auto& a = accum[metric];
        a.sum += err;
        a.max_abs = std::max(a.max_abs, std::fabs(err));
        ++a.n;
        if (gated && std::fabs(err) > gate_threshold) out.gate_ok = false;
      } else {
        r = {fmt_num(lam), metric, fmt_num(id), fmt_num(analysis),
             fmt_num(sim), fmt_num(ci), "", "na"};
      }
    };

    for (int i = 0; i < m.size(); ++i) {
      if (m.nodes[i].id == m.bs_id) continue;
      const int id = m.nodes[i].id;
      emit("alpha", id, fp.nodes[i].alpha, agg.nodes[i].alpha.mean,
           agg.nodes[i].alpha.ci95, false);
      emit("gamma", id, fp.nodes[i].gamma, agg.nodes[i].gamma.mean,
           agg.nodes[i].gamma.ci95, false);
      emit("delta", id, fp.nodes[i].delta, agg.nodes[i].delta.mean,
           agg.nodes[i].delta.ci95, false);
      emit("q", id, fp.nodes[i].q, agg.nodes[i].q.mean, agg.nodes[i].q.ci95,
           false);
      emit("b", id, fp.nodes[i].b, agg.nodes[i].b.mean, agg.nodes[i].b.ci95,
           false);
    }
    for (const auto& src : rep.sources) {
      const int i = nb.index_of.at(src.node_id);
      emit("delay_ms", src.node_id,
           std::isinf(src.delay_symbols) ? INFINITY
                                         : units::symbols_to_ms(src.delay_symbols),
           agg.sources[i].delay_ms.mean, agg.sources[i].delay_ms.ci95, true);
      emit("p_del", src.node_id, src.p_delivery, agg.sources[i].p_del.mean,
           agg.sources[i].p_del.ci95, true);
    }

    for (const auto& [metric, a] : accum) {
      auto& r = out.summary.add_row();
      const double mean = a.n ? a.sum / a.n : 0.0;
      r = {fmt_num(lam), metric,        fmt_num(mean),
           fmt_num(a.max_abs), band_label(mean), low_discard ? "1" : "0",
           high_rate ? "1" : "0"};
    }
  }
  return out;
}

}  // namespace wpan
