#pragma once

#include <string>
#include <vector>

#include "wpan/csv.hpp"
#include "wpan/scenario.hpp"
#include "wpan/sim.hpp"

// End-to-end runs behind the command-line interface, exposed as functions
// so tests can pin the CSV schemas and the comparison verdicts.

namespace wpan {

// Empty lambda list = keep the per-node rates from the scenario file; the
// lambda_pps column then records -1.
struct AnalyzeOutput {
  Table nodes;    // one row per (lambda, node)
  Table sources;  // one row per (lambda, source)
  Table summary;  // one row per lambda
  bool all_converged = true;
  bool any_unstable = false;
};
AnalyzeOutput run_analyze(const Scenario& sc, const std::vector<double>& lambdas);

struct SimulateOutput {
  Table nodes;
  Table sources;
  Table summary;
};
SimulateOutput run_simulate(const Scenario& sc, const std::vector<double>& lambdas,
                            const SimConfig& cfg);

// Relative error convention: (sim - analysis) / sim, so a model that
// overestimates shows up negative.  Bands: "ok" within 10%, "+"/"-" within
// 25%, "++"/"--" beyond.
std::string band_label(double rel_err);

struct CompareOutput {
  Table rows;     // one row per (lambda, metric, node-or-source)
  Table summary;  // one row per (lambda, metric)
  bool gate_ok = true;      // delay/p_del within the gate threshold
  bool all_converged = true;
};
CompareOutput run_compare(const Scenario& sc, const std::vector<double>& lambdas,
                          const SimConfig& sim_cfg, double gate_threshold);

}  // namespace wpan
