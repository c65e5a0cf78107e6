// wpanperf: performance engineering for beaconless IEEE 802.15.4
// convergecast trees.  Subcommands: analyze, simulate, compare, design,
// gen-scenario.  Exit codes: 0 ok; 1 usage error; 2 invalid input or
// failed computation; 3 result fails its quality gate (comparison
// tolerance, stability, or design feasibility).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpan/csv.hpp"
#include "wpan/designer.hpp"
#include "wpan/pipeline.hpp"
#include "wpan/scenario.hpp"
#include "wpan/scenario_gen.hpp"
#include "wpan/sim.hpp"
#include "wpan/units.hpp"

namespace {

namespace fs = std::filesystem;
using namespace wpan;

std::vector<double> parse_lambda_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

std::string default_out_dir() {
  const char* env = std::getenv("WPAN_OUT_DIR");
  return env && *env ? env : ".";
}

// Flags shared by the engines.
struct CommonOpts {
  std::string scenario_path;
  std::string lambda_list;
  std::string out_dir = default_out_dir();
  std::string teff_model;
  double damping = -1.0;
  double tol = -1.0;
  int max_iter = -1;
  bool no_acks = false;
};

void add_scenario_opts(CLI::App* cmd, CommonOpts& o, bool with_analysis) {
  cmd->add_option("--scenario", o.scenario_path, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--lambda-list", o.lambda_list,
                  "comma-separated per-source rates in packets/s; empty keeps "
                  "the rates from the scenario");
  cmd->add_option("--out-dir", o.out_dir,
                  "directory for CSV output (default: WPAN_OUT_DIR or .)");
  cmd->add_flag("--no-acks", o.no_acks, "disable MAC acknowledgements");
  if (with_analysis) {
    cmd->add_option("--teff-model", o.teff_model,
                    "busy-period dilation model: mdinf or boorstyn")
        ->check(CLI::IsMember({"mdinf", "boorstyn"}));
    cmd->add_option("--damping", o.damping, "fixed-point damping in (0,1]");
    cmd->add_option("--tol", o.tol, "fixed-point relative tolerance");
    cmd->add_option("--max-iter", o.max_iter, "fixed-point iteration cap");
  }
}

Scenario load_with_opts(const CommonOpts& o) {
  Scenario sc = load_scenario(o.scenario_path);
  if (o.no_acks) sc.protocol.acks_enabled = false;
  if (!o.teff_model.empty())
    sc.analysis.teff_model = teff_model_from_string(o.teff_model);
  if (o.damping > 0.0) sc.analysis.damping = o.damping;
  if (o.tol > 0.0) sc.analysis.tol = o.tol;
  if (o.max_iter > 0) sc.analysis.max_iter = o.max_iter;
  return sc;
}

int cmd_analyze(const CommonOpts& o) {
  Scenario sc = load_with_opts(o);
  AnalyzeOutput out = run_analyze(sc, parse_lambda_list(o.lambda_list));
  write_csv(out.nodes, out_path(o.out_dir, "analyze_nodes.csv"));
  write_csv(out.sources, out_path(o.out_dir, "analyze_sources.csv"));
  write_csv(out.summary, out_path(o.out_dir, "analyze_summary.csv"));
  std::cout << out.summary.to_csv();
  if (!out.all_converged) {
    std::cerr << "analyze: fixed point did not converge for some rates\n";
    return 2;
  }
  if (out.any_unstable) {
    std::cerr << "analyze: network saturated at some rates; results there are "
                 "extrapolation\n";
    return 3;
  }
  return 0;
}

int cmd_simulate(const CommonOpts& o, const SimConfig& cfg) {
  Scenario sc = load_with_opts(o);
  SimulateOutput out = run_simulate(sc, parse_lambda_list(o.lambda_list), cfg);
  write_csv(out.nodes, out_path(o.out_dir, "sim_nodes.csv"));
  write_csv(out.sources, out_path(o.out_dir, "sim_sources.csv"));
  write_csv(out.summary, out_path(o.out_dir, "sim_summary.csv"));
  std::cout << out.summary.to_csv();
  return 0;
}

int cmd_compare(const CommonOpts& o, const SimConfig& cfg, double gate,
                bool no_gate) {
  Scenario sc = load_with_opts(o);
  CompareOutput out =
      run_compare(sc, parse_lambda_list(o.lambda_list), cfg, gate);
  write_csv(out.rows, out_path(o.out_dir, "compare_rows.csv"));
  write_csv(out.summary, out_path(o.out_dir, "compare_summary.csv"));
  std::cout << out.summary.to_csv();
  if (!out.all_converged) {
    std::cerr << "compare: fixed point did not converge for some rates\n";
    return 2;
  }
  if (!no_gate && !out.gate_ok) {
    std::cerr << "compare: delay/p_del disagreement beyond " << gate * 100
              << "% of the simulation value\n";
    return 3;
  }
  return 0;
}

struct DesignOpts {
  std::string problem_path;
  std::string out_dir = default_out_dir();
  std::string qos;  // p=..,pdel=..,dmax-ms=..,lambda-pps=..
  bool lone_packet_only = false;
  bool validate_sim = false;
  double sim_duration_s = 300.0;
  int sim_reps = 5;
  uint64_t seed = 1;
  std::string teff_model;
};

void apply_qos_string(const std::string& s, QosSpec& q) {
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--qos", "expected key=value, got: " + tok);
    const std::string key = tok.substr(0, eq);
    const double val = std::stod(tok.substr(eq + 1));
    if (key == "p")
      q.per = val;
    else if (key == "pdel")
      q.p_del = val;
    else if (key == "dmax-ms")
      q.d_max_ms = val;
    else if (key == "lambda-pps")
      q.lambda_pps = val;
    else if (key == "dbar-symbols")
      q.single_hop_delay_symbols = val;
    else
      throw CLI::ValidationError("--qos", "unknown key: " + key);
  }
}

Table design_trace_table(const DesignResult& res) {
  Table t;
  t.header = {"step",     "max_edge_m",    "hops_worst", "hop_ok",
              "load_ok",  "delay_worst_ms", "p_del_worst", "note"};
  for (const auto& row : res.trace) {
    auto& r = t.add_row();
    r = {fmt_num(row.step),        fmt_num(row.w_max),
         fmt_num(row.hops_worst),  row.hop_ok ? "1" : "0",
         row.load_ok ? "1" : "0",  fmt_num(row.delay_worst_ms),
         fmt_num(row.p_del_worst), "\"" + row.note + "\""};
  }
  return t;
}

int cmd_design(const DesignOpts& o) {
  DesignProblem prob = load_design_problem(o.problem_path);
  if (!o.qos.empty()) apply_qos_string(o.qos, prob.qos);

  ProtocolParams proto;
  AnalysisConfig cfg;
  if (!o.teff_model.empty()) cfg.teff_model = teff_model_from_string(o.teff_model);

  DesignResult res = o.lone_packet_only || prob.qos.lambda_pps <= 0.0
                         ? design_min_power(prob, proto)
                         : design_min_power_loaded(prob, proto, cfg);

  std::ofstream out(out_path(o.out_dir, "design.json"));
  out << design_result_to_json(res);
  write_csv(design_trace_table(res), out_path(o.out_dir, "design_trace.csv"));
  std::cout << "status: " << to_string(res.status)
            << "  max_edge_m: " << fmt_num(res.max_edge)
            << "  max_hops: " << res.max_hops << "\n";

  if (res.status == DesignStatus::kInfeasible) return 3;

  if (o.validate_sim && !res.parent.empty()) {
    Scenario sc = scenario_from_tree(prob, res.parent, proto);
    Neighborhoods nb = derive_neighborhoods(sc.model);
    SimConfig sim_cfg;
    sim_cfg.duration_s = o.sim_duration_s;
    sim_cfg.warmup_s = std::min(50.0, o.sim_duration_s / 6.0);
    sim_cfg.reps = o.sim_reps;
    sim_cfg.seed = o.seed;
    SimAggregate agg = replicate(sc.model, nb, sc.protocol, sim_cfg);
    double worst_delay = 0.0, worst_pdel = 1.0;
    for (int i = 0; i < sc.model.size(); ++i) {
      if (sc.model.nodes[i].role != NodeRole::kSource) continue;
      worst_delay = std::max(worst_delay, agg.sources[i].delay_ms.mean);
      worst_pdel = std::min(worst_pdel, agg.sources[i].p_del.mean);
    }
    const bool ok =
        worst_delay <= prob.qos.d_max_ms && worst_pdel >= prob.qos.p_del;
    std::cout << "sim check: worst delay " << fmt_num(worst_delay)
              << " ms, worst p_del " << fmt_num(worst_pdel) << " -> "
              << (ok ? "meets QoS" : "VIOLATES QoS") << "\n";
    if (!ok) return 3;
  }
  if (res.status == DesignStatus::kPossiblyInfeasible) return 3;
  return 0;
}

struct GenOpts {
  std::string family;
  int n = 10;
  double cs = 3.0;
  double per = 0.01;
  double lambda = 1.0;
  uint64_t seed = 1;
  double area_m = 100.0;
  double radius_m = 10.0;
  double spacing_m = 10.0;
  std::string qos;
  std::string out;
};

int cmd_gen(const GenOpts& o) {
  if (o.family == "lattice") {
    QosSpec qos;
    qos.lambda_pps = o.lambda;
    qos.per = o.per;
    if (!o.qos.empty()) apply_qos_string(o.qos, qos);
    DesignProblem prob = make_lattice_problem(o.n, o.seed, qos);
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    f << design_problem_to_json(prob);
  } else {
    Scenario sc;
    if (o.family == "tree")
      sc = gen_tree_scenario(o.n, o.cs, o.per, o.lambda, o.seed, o.area_m);
    else if (o.family == "star")
      sc = gen_star_scenario(o.n, static_cast<int>(o.cs), o.per, o.lambda,
                             o.radius_m);
    else if (o.family == "line")
      sc = gen_line_scenario(o.n, static_cast<int>(o.cs), o.per, o.lambda,
                             o.spacing_m);
    else
      throw CLI::ValidationError("--family",
                                 "expected tree, star, line or lattice");
    save_scenario(sc, o.out);
  }
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Performance toolkit for beaconless 802.15.4 convergecast trees"};
  app.require_subcommand(1);

  CommonOpts an, si, co;
  SimConfig sim_cfg, cmp_cfg;
  double gate = 0.15;
  bool no_gate = false;
  DesignOpts de;
  GenOpts ge;

  CLI::App* a = app.add_subcommand("analyze", "fixed-point + delay analysis");
  add_scenario_opts(a, an, true);

  CLI::App* s = app.add_subcommand("simulate", "discrete-event simulation");
  add_scenario_opts(s, si, false);
  s->add_option("--duration-s", sim_cfg.duration_s, "simulated seconds per rep");
  s->add_option("--warmup-s", sim_cfg.warmup_s, "discarded leading seconds");
  s->add_option("--reps", sim_cfg.reps, "independent replications");
  s->add_option("--seed", sim_cfg.seed, "base RNG seed");

  CLI::App* c = app.add_subcommand(
      "compare", "run both engines and band the disagreement");
  add_scenario_opts(c, co, true);
  c->add_option("--duration-s", cmp_cfg.duration_s, "simulated seconds per rep");
  c->add_option("--warmup-s", cmp_cfg.warmup_s, "discarded leading seconds");
  c->add_option("--reps", cmp_cfg.reps, "independent replications");
  c->add_option("--seed", cmp_cfg.seed, "base RNG seed");
  c->add_option("--gate-threshold", gate,
                "fail (exit 3) when |rel err| of delay/p_del exceeds this");
  c->add_flag("--no-gate", no_gate, "report only, never exit 3");

  CLI::App* d = app.add_subcommand(
      "design", "minimum-power QoS-constrained tree construction");
  d->add_option("--problem", de.problem_path, "design problem JSON")
      ->required()
      ->check(CLI::ExistingFile);
  d->add_option("--qos", de.qos,
                "override QoS: p=,pdel=,dmax-ms=,lambda-pps=[,dbar-symbols=]");
  d->add_option("--out-dir", de.out_dir, "output directory");
  d->add_flag("--lone-packet-only", de.lone_packet_only,
              "skip the positive-load analytical check");
  d->add_flag("--validate-sim", de.validate_sim,
              "simulate the designed tree and check QoS");
  d->add_option("--sim-duration-s", de.sim_duration_s, "validation run length");
  d->add_option("--sim-reps", de.sim_reps, "validation replications");
  d->add_option("--seed", de.seed, "validation RNG seed");
  d->add_option("--teff-model", de.teff_model, "mdinf or boorstyn")
      ->check(CLI::IsMember({"mdinf", "boorstyn"}));

  CLI::App* g = app.add_subcommand("gen-scenario", "emit a scenario file");
  g->add_option("--family", ge.family, "tree, star, line or lattice")->required();
  g->add_option("--n", ge.n, "number of sources");
  g->add_option("--cs", ge.cs, "carrier-sense degree target");
  g->add_option("--per", ge.per, "link packet error rate");
  g->add_option("--lambda", ge.lambda, "per-source packets/s");
  g->add_option("--seed", ge.seed, "RNG seed");
  g->add_option("--area-m", ge.area_m, "square side for the tree family");
  g->add_option("--radius-m", ge.radius_m, "ring radius for the star family");
  g->add_option("--spacing-m", ge.spacing_m, "hop spacing for the line family");
  g->add_option("--qos", ge.qos, "QoS spec for the lattice family");
  g->add_option("--out", ge.out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (a->parsed()) return cmd_analyze(an);
    if (s->parsed()) return cmd_simulate(si, sim_cfg);
    if (c->parsed()) return cmd_compare(co, cmp_cfg, gate, no_gate);
    if (d->parsed()) return cmd_design(de);
    if (g->parsed()) return cmd_gen(ge);
  } catch (const wpan::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
