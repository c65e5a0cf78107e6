#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wpan/designer.hpp"

namespace wpan {

using nlohmann::json;

DesignProblem parse_design_problem(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioFormatError(std::string("design problem is not valid JSON: ") +
                              e.what());
  }
  DesignProblem prob;
  try {
    const auto& jb = j.at("bs");
    prob.bs = {jb.at("id").get<int>(), jb.at("x").get<double>(),
               jb.at("y").get<double>()};
    for (const auto& jn : j.at("nodes"))
      prob.nodes.push_back({jn.at("id").get<int>(), jn.at("x").get<double>(),
                            jn.at("y").get<double>()});
    if (j.contains("edges"))
      for (const auto& je : j.at("edges"))
        prob.edges.push_back({je.at("a").get<int>(), je.at("b").get<int>(),
                              je.value("length", 0.0), je.value("per", -1.0)});
    if (j.contains("qos")) {
      const auto& jq = j.at("qos");
      prob.qos.per = jq.value("per", prob.qos.per);
      prob.qos.p_del = jq.value("p_del", prob.qos.p_del);
      prob.qos.d_max_ms = jq.value("d_max_ms", prob.qos.d_max_ms);
      prob.qos.lambda_pps = jq.value("lambda_pps", prob.qos.lambda_pps);
      if (jq.contains("single_hop_delay_symbols"))
        prob.qos.single_hop_delay_symbols =
            jq.at("single_hop_delay_symbols").get<double>();
    }
  } catch (const json::exception& e) {
    throw ScenarioFormatError(std::string("design problem has wrong shape: ") +
                              e.what());
  }
  return prob;
}

DesignProblem load_design_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioFormatError("cannot open design problem file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_design_problem(buf.str());
}

std::string design_problem_to_json(const DesignProblem& prob) {
  json j;
  j["bs"] = {{"id", prob.bs.id}, {"x", prob.bs.x}, {"y", prob.bs.y}};
  j["nodes"] = json::array();
  for (const auto& nd : prob.nodes)
    j["nodes"].push_back({{"id", nd.id}, {"x", nd.x}, {"y", nd.y}});
  if (!prob.edges.empty()) {
    j["edges"] = json::array();
    for (const auto& e : prob.edges) {
      json je = {{"a", e.a}, {"b", e.b}, {"length", e.length}};
      if (e.per >= 0.0) je["per"] = e.per;
      j["edges"].push_back(je);
    }
  }
  json jq = {{"per", prob.qos.per},
             {"p_del", prob.qos.p_del},
             {"d_max_ms", prob.qos.d_max_ms},
             {"lambda_pps", prob.qos.lambda_pps}};
  if (prob.qos.single_hop_delay_symbols)
    jq["single_hop_delay_symbols"] = *prob.qos.single_hop_delay_symbols;
  j["qos"] = jq;
  return j.dump(2) + "\n";
}

std::string design_result_to_json(const DesignResult& res) {
  json j;
  j["status"] = to_string(res.status);
  j["max_edge_m"] = res.max_edge;
  j["max_hops"] = res.max_hops;
  j["hop_budget"] = {{"h_delay", res.budget.h_delay},
                     {"h_delivery", res.budget.h_delivery},
                     {"h_max", res.budget.h_max},
                     {"feasible", res.budget.feasible}};
  json jp = json::object();
  for (const auto& [id, pid] : res.parent) jp[std::to_string(id)] = pid;
  j["parent"] = jp;
  if (res.load_check) {
    j["load_check"] = {{"pass", res.load_check->pass},
                       {"converged", res.load_check->converged},
                       {"delay_worst_ms", res.load_check->delay_worst_ms},
                       {"p_del_worst", res.load_check->p_del_worst}};
  }
  return j.dump(2) + "\n";
}

}  // namespace wpan
