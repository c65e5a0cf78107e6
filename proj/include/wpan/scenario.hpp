#pragma once

#include <string>

#include "wpan/network.hpp"
#include "wpan/protocol.hpp"

namespace wpan {

enum class TeffModel { kMdInfinity, kBoorstyn };

std::string to_string(TeffModel m);
TeffModel teff_model_from_string(const std::string& s);

// Knobs of the fixed-point solver.
struct AnalysisConfig {
  double tol = 1e-6;           // relative residual for convergence
  int max_iter = 10000;
  double damping = 0.5;        // 1 = undamped successive substitution
  double init_tau_pps = 10.0;  // starting guess for perceived attempt rates
  bool clamp_q = true;         // clamp queue utilization at 1
  TeffModel teff_model = TeffModel::kBoorstyn;
};

struct Scenario {
  NetworkModel model;
  ProtocolParams protocol;
  AnalysisConfig analysis;
};

struct ScenarioFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse/serialize the scenario JSON document.  load_scenario validates the
// result and throws ValidationError listing every violated constraint.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace wpan
