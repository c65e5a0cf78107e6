#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wpan/protocol.hpp"
#include "wpan/scenario.hpp"

// QoS-constrained convergecast design: pick parents so that the longest
// tree edge (a proxy for transmit power) is as short as possible while the
// hop count keeps lone-packet delay and delivery within budget; optionally
// re-check the result under positive load with the analytical model.

namespace wpan {

struct QosSpec {
  double per = 0.01;        // packet error rate of usable links
  double p_del = 0.95;      // required end-to-end delivery probability
  double d_max_ms = 25.0;   // required end-to-end mean delay
  double lambda_pps = 1.0;  // per-source load for the positive-load check
  // When set, overrides the computed mean single-hop delay (symbols) in
  // the hop-budget calculation.
  std::optional<double> single_hop_delay_symbols;
};

// Mean MAC-to-MAC delay of a single hop with no contention: per attempt a
// mean first backoff, CCA, turnaround and frame time; geometric retries
// with per-transmission loss `per`, conditioned on eventual success.
double lone_packet_delay_symbols(double per, const ProtocolParams& p);

struct HopBudget {
  long long h_delay = 0;     // hops affordable within d_max
  long long h_delivery = 0;  // hops affordable within p_del
  long long h_max = 0;       // min of the two
  bool feasible = false;     // h_max >= 1
};
HopBudget hop_budget(const QosSpec& qos, const ProtocolParams& p);

struct DesignNode {
  int id = 0;
  double x = 0.0, y = 0.0;
};

struct DesignEdge {
  int a = 0, b = 0;
  double length = 0.0;
  double per = -1.0;  // negative: use qos.per
};

struct DesignProblem {
  DesignNode bs;
  std::vector<DesignNode> nodes;   // the sources to attach
  std::vector<DesignEdge> edges;   // candidate links; empty = complete graph
  QosSpec qos;
};

enum class DesignStatus {
  kOptimalLonePacket,    // minimal max edge proven under lone-packet QoS
  kFeasiblePositiveLoad, // tree passes the analytical check under load
  kInfeasible,           // no tree satisfies the hop budget
  kPossiblyInfeasible,   // hop-feasible trees exist but none passed the
                         // positive-load check
};

std::string to_string(DesignStatus s);

struct DesignTraceRow {
  int step = 0;
  double w_max = 0.0;       // longest tree edge at this step
  int hops_worst = 0;
  bool hop_ok = false;
  bool load_ok = false;     // positive-load QoS (extended algorithm only)
  double delay_worst_ms = 0.0;
  double p_del_worst = 1.0;
  std::string note;
};

struct LoadCheck {
  bool pass = false;
  bool converged = false;
  double delay_worst_ms = 0.0;
  double p_del_worst = 1.0;
};

struct DesignResult {
  DesignStatus status = DesignStatus::kInfeasible;
  std::map<int, int> parent;  // node id -> parent id; empty when infeasible
  double max_edge = 0.0;
  int max_hops = 0;
  HopBudget budget;
  std::vector<DesignTraceRow> trace;
  std::optional<LoadCheck> load_check;
};

// Shortest-path-tree iterative edge pruning: minimizes the longest tree
// edge subject to the lone-packet hop budget.
DesignResult design_min_power(const DesignProblem& prob,
                              const ProtocolParams& p);

// Same, then verifies the tree under positive load with the fixed-point +
// queueing analysis; on failure re-admits pruned edge lengths in
// increasing order until some tree passes.
DesignResult design_min_power_loaded(const DesignProblem& prob,
                                     const ProtocolParams& p,
                                     const AnalysisConfig& cfg);

// Network scenario realizing a designed tree: every node a source at the
// QoS load, every pair mutually in carrier-sense range, per-link PER from
// the candidate edges.
Scenario scenario_from_tree(const DesignProblem& prob,
                            const std::map<int, int>& parent,
                            const ProtocolParams& p);

// Random design instance: sources on a 50 m x 50 m lattice with 10 m cells,
// BS at the origin corner, complete candidate graph.
DesignProblem make_lattice_problem(int n_sources, uint64_t seed,
                                   const QosSpec& qos, double area_m = 50.0,
                                   double cell_m = 10.0);

DesignProblem parse_design_problem(const std::string& json_text);
DesignProblem load_design_problem(const std::string& path);
std::string design_problem_to_json(const DesignProblem& prob);
std::string design_result_to_json(const DesignResult& res);

}  // namespace wpan
