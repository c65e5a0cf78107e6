#include "wpan/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wpan {

using nlohmann::json;

std::string to_string(TeffModel m) {
  return m == TeffModel::kMdInfinity ? "mdinf" : "boorstyn";
}

TeffModel teff_model_from_string(const std::string& s) {
  if (s == "mdinf") return TeffModel::kMdInfinity;
  if (s == "boorstyn") return TeffModel::kBoorstyn;
  throw std::invalid_argument("unknown busy-period model: " + s +
                              " (expected mdinf or boorstyn)");
}

namespace {

void read_protocol(const json& j, ProtocolParams& p) {
  p.slot_symbols = j.value("slot_symbols", p.slot_symbols);
  p.cca_symbols = j.value("cca_symbols", p.cca_symbols);
  p.turnaround_symbols = j.value("turnaround_symbols", p.turnaround_symbols);
  p.ack_symbols = j.value("ack_symbols", p.ack_symbols);
  p.ack_wait_symbols = j.value("ack_wait_symbols", p.ack_wait_symbols);
  p.mac_min_be = j.value("mac_min_be", p.mac_min_be);
  p.mac_max_be = j.value("mac_max_be", p.mac_max_be);
  p.max_csma_backoffs = j.value("max_csma_backoffs", p.max_csma_backoffs);
  p.max_frame_retries = j.value("max_frame_retries", p.max_frame_retries);
  p.data_tx_symbols = j.value("data_tx_symbols", p.data_tx_symbols);
}

void read_analysis(const json& j, AnalysisConfig& a) {
  a.tol = j.value("tol", a.tol);
  a.max_iter = j.value("max_iter", a.max_iter);
  a.damping = j.value("damping", a.damping);
  a.init_tau_pps = j.value("init_tau_pps", a.init_tau_pps);
  a.clamp_q = j.value("clamp_q", a.clamp_q);
  if (j.contains("teff_model"))
    a.teff_model = teff_model_from_string(j.at("teff_model").get<std::string>());
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioFormatError(std::string("scenario is not valid JSON: ") + e.what());
  }

  Scenario s;
  try {
    s.model.name = j.value("name", "");
    s.model.bs_id = j.at("bs_id").get<int>();
    if (j.contains("cs_range_m")) s.model.cs_range_m = j.at("cs_range_m").get<double>();
    s.protocol.acks_enabled = j.value("acks_enabled", true);
    if (j.contains("protocol")) read_protocol(j.at("protocol"), s.protocol);
    if (j.contains("analysis")) read_analysis(j.at("analysis"), s.analysis);

    for (const auto& jn : j.at("nodes")) {
      NodeSpec n;
      n.id = jn.at("id").get<int>();
      n.x = jn.at("x").get<double>();
      n.y = jn.at("y").get<double>();
      n.role = role_from_string(jn.value("role", "source"));
      n.lambda_pps = jn.value("lambda_pps", 0.0);
      n.link_per = jn.value("link_per", 0.0);
      s.model.nodes.push_back(n);
    }
    if (j.contains("parent"))
      for (const auto& [k, v] : j.at("parent").items())
        s.model.parent[std::stoi(k)] = v.get<int>();
    if (j.contains("cs_sets")) {
      std::map<int, std::vector<int>> cs;
      for (const auto& [k, v] : j.at("cs_sets").items())
        cs[std::stoi(k)] = v.get<std::vector<int>>();
      s.model.explicit_cs = std::move(cs);
    }
  } catch (const json::exception& e) {
    throw ScenarioFormatError(std::string("scenario JSON has wrong shape: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioFormatError(std::string("scenario JSON has bad value: ") + e.what());
  }

  require_valid(s.model);
  {
    auto errs = s.protocol.validate();
    if (!errs.empty()) throw ValidationError(errs);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioFormatError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  if (!s.model.name.empty()) j["name"] = s.model.name;
  j["bs_id"] = s.model.bs_id;
  if (s.model.cs_range_m) j["cs_range_m"] = *s.model.cs_range_m;
  j["acks_enabled"] = s.protocol.acks_enabled;

  ProtocolParams def;
  json jp;
  if (s.protocol.slot_symbols != def.slot_symbols) jp["slot_symbols"] = s.protocol.slot_symbols;
  if (s.protocol.cca_symbols != def.cca_symbols) jp["cca_symbols"] = s.protocol.cca_symbols;
  if (s.protocol.turnaround_symbols != def.turnaround_symbols)
    jp["turnaround_symbols"] = s.protocol.turnaround_symbols;
  if (s.protocol.ack_symbols != def.ack_symbols) jp["ack_symbols"] = s.protocol.ack_symbols;
  if (s.protocol.ack_wait_symbols != def.ack_wait_symbols)
    jp["ack_wait_symbols"] = s.protocol.ack_wait_symbols;
  if (s.protocol.mac_min_be != def.mac_min_be) jp["mac_min_be"] = s.protocol.mac_min_be;
  if (s.protocol.mac_max_be != def.mac_max_be) jp["mac_max_be"] = s.protocol.mac_max_be;
  if (s.protocol.max_csma_backoffs != def.max_csma_backoffs)
    jp["max_csma_backoffs"] = s.protocol.max_csma_backoffs;
  if (s.protocol.max_frame_retries != def.max_frame_retries)
    jp["max_frame_retries"] = s.protocol.max_frame_retries;
  if (s.protocol.data_tx_symbols != def.data_tx_symbols)
    jp["data_tx_symbols"] = s.protocol.data_tx_symbols;
  if (!jp.empty()) j["protocol"] = jp;

  AnalysisConfig adef;
  json ja;
  if (s.analysis.tol != adef.tol) ja["tol"] = s.analysis.tol;
  if (s.analysis.max_iter != adef.max_iter) ja["max_iter"] = s.analysis.max_iter;
  if (s.analysis.damping != adef.damping) ja["damping"] = s.analysis.damping;
  if (s.analysis.init_tau_pps != adef.init_tau_pps) ja["init_tau_pps"] = s.analysis.init_tau_pps;
  if (s.analysis.clamp_q != adef.clamp_q) ja["clamp_q"] = s.analysis.clamp_q;
  if (s.analysis.teff_model != adef.teff_model)
    ja["teff_model"] = to_string(s.analysis.teff_model);
  if (!ja.empty()) j["analysis"] = ja;

  j["nodes"] = json::array();
  for (const auto& n : s.model.nodes) {
    json jn;
    jn["id"] = n.id;
    jn["x"] = n.x;
    jn["y"] = n.y;
    jn["role"] = to_string(n.role);
    jn["lambda_pps"] = n.lambda_pps;
    jn["link_per"] = n.link_per;
    j["nodes"].push_back(jn);
  }
  json jparent = json::object();
  for (const auto& [id, pid] : s.model.parent) jparent[std::to_string(id)] = pid;
  j["parent"] = jparent;
  if (s.model.explicit_cs) {
    json jcs = json::object();
    for (const auto& [id, set] : *s.model.explicit_cs) jcs[std::to_string(id)] = set;
    j["cs_sets"] = jcs;
  }
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioFormatError("cannot write scenario file: " + path);
  out << scenario_to_json(s);
}

}  // namespace wpan
