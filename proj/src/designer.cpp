#include "wpan/designer.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wpan/fixed_point.hpp"
#include "wpan/qna.hpp"
#include "wpan/rng.hpp"
#include "wpan/units.hpp"

namespace wpan {

std::string to_string(DesignStatus s) {
  switch (s) {
    case DesignStatus::kOptimalLonePacket: return "optimal-lone-packet";
    case DesignStatus::kFeasiblePositiveLoad: return "feasible-positive-load";
    case DesignStatus::kInfeasible: return "infeasible";
    case DesignStatus::kPossiblyInfeasible: return "possibly-infeasible";
  }
  return "?";
}

double lone_packet_delay_symbols(double per, const ProtocolParams& p) {
  if (per < 0.0 || per >= 1.0)
    throw std::domain_error("lone_packet_delay: per must be in [0,1)");
  const double attempt = p.mean_backoff_symbols(0) + p.cca_symbols +
                         p.turnaround_symbols + p.tx_period();
  const int r = p.transmissions() - 1;
  // E[#transmissions | delivered] under geometric per-transmission loss
  // truncated at r retries.
  double num = 0.0, pk = 1.0;
  for (int k = 0; k <= r; ++k) {
    num += (k + 1) * pk * (1.0 - per);
    pk *= per;
  }
  const double denom = 1.0 - pk;  // 1 - per^(r+1)
  return attempt * num / denom;
}

HopBudget hop_budget(const QosSpec& qos, const ProtocolParams& p) {
  if (qos.p_del <= 0.0 || qos.p_del > 1.0)
    throw std::domain_error("hop_budget: p_del must be in (0,1]");
  if (qos.d_max_ms <= 0.0)
    throw std::domain_error("hop_budget: d_max_ms must be positive");
  HopBudget hb;
  const double d_hop = qos.single_hop_delay_symbols
                           ? *qos.single_hop_delay_symbols
                           : lone_packet_delay_symbols(qos.per, p);
  hb.h_delay =
      static_cast<long long>(std::floor(units::ms_to_symbols(qos.d_max_ms) / d_hop));

  const double q_fail = std::pow(qos.per, p.transmissions());
  if (q_fail <= 0.0) {
    hb.h_delivery = LLONG_MAX;
  } else if (qos.p_del >= 1.0) {
    hb.h_delivery = 0;
  } else {
    hb.h_delivery = static_cast<long long>(
        std::floor(std::log(qos.p_del) / std::log1p(-q_fail)));
  }
  hb.h_max = std::min(hb.h_delay, hb.h_delivery);
  hb.feasible = hb.h_max >= 1;
  return hb;
}

namespace {

struct Graph {
  std::vector<int> ids;            // index 0 = BS
  std::map<int, int> index_of;
  std::vector<std::vector<std::pair<int, double>>> adj;  // (neighbor, length)
};

struct Spt {
  bool connected = false;
  bool hop_ok = false;
  int max_hops = 0;
  double w_max = 0.0;
  std::map<int, int> parent;  // by node id
};

double edge_length(const DesignNode& a, const DesignNode& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Candidate graph with the given maximum admitted edge length (inf = all).
Graph build_graph(const DesignProblem& prob,
                  const std::vector<DesignEdge>& edges, double max_len) {
  Graph g;
  g.ids.push_back(prob.bs.id);
  g.index_of[prob.bs.id] = 0;
  for (const auto& nd : prob.nodes) {
    g.index_of[nd.id] = static_cast<int>(g.ids.size());
    g.ids.push_back(nd.id);
  }
  g.adj.assign(g.ids.size(), {});
  for (const auto& e : edges) {
    if (e.length > max_len) continue;
    const int a = g.index_of.at(e.a), b = g.index_of.at(e.b);
    g.adj[a].push_back({b, e.length});
    g.adj[b].push_back({a, e.length});
  }
  for (auto& lst : g.adj)
    std::sort(lst.begin(), lst.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
  return g;
}

// Hop-count shortest-path tree rooted at the BS.  Among the minimum-hop
// parents each node takes the shortest edge (node id breaks ties), which
// also minimizes the tree's longest edge over all minimum-hop trees.
Spt shortest_path_tree(const Graph& g, long long h_max) {
  const int n = static_cast<int>(g.ids.size());
  std::vector<int> depth(n, -1);
  std::vector<int> frontier{0};
  depth[0] = 0;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int u : frontier)
      for (const auto& [v, len] : g.adj[u])
        if (depth[v] < 0) {
          depth[v] = depth[u] + 1;
          next.push_back(v);
        }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }

  Spt t;
  t.connected = true;
  for (int v = 1; v < n; ++v) {
    if (depth[v] < 0) {
      t.connected = false;
      return t;
    }
    int best = -1;
    double best_len = 0.0;
    for (const auto& [u, len] : g.adj[v]) {
      if (depth[u] != depth[v] - 1) continue;
      if (best < 0 || len < best_len ||
          (len == best_len && g.ids[u] < g.ids[best])) {
        best = u;
        best_len = len;
      }
    }
    t.parent[g.ids[v]] = g.ids[best];
    t.w_max = std::max(t.w_max, best_len);
    t.max_hops = std::max(t.max_hops, depth[v]);
  }
  t.hop_ok = t.max_hops <= h_max;
  return t;
}

std::vector<DesignEdge> candidate_edges(const DesignProblem& prob) {
  std::vector<DesignEdge> edges = prob.edges;
  if (edges.empty()) {
    std::vector<DesignNode> all{prob.bs};
    all.insert(all.end(), prob.nodes.begin(), prob.nodes.end());
    for (size_t i = 0; i < all.size(); ++i)
      for (size_t j = i + 1; j < all.size(); ++j)
        edges.push_back({all[i].id, all[j].id,
                         edge_length(all[i], all[j]), -1.0});
  } else {
    std::map<int, DesignNode> by_id{{prob.bs.id, prob.bs}};
    for (const auto& nd : prob.nodes) by_id[nd.id] = nd;
    for (auto& e : edges) {
      if (!by_id.count(e.a) || !by_id.count(e.b))
        throw std::invalid_argument("design edge mentions unknown node");
      if (e.length <= 0.0) e.length = edge_length(by_id.at(e.a), by_id.at(e.b));
    }
  }
  return edges;
}

}  // namespace

DesignResult design_min_power(const DesignProblem& prob,
                              const ProtocolParams& p) {
  DesignResult res;
  res.budget = hop_budget(prob.qos, p);
  if (!res.budget.feasible) {
    res.status = DesignStatus::kInfeasible;
    res.trace.push_back({0, 0.0, 0, false, false, 0.0, 1.0,
                         "hop budget below one hop: nothing can be attached"});
    return res;
  }
  if (prob.nodes.empty()) {
    res.status = DesignStatus::kOptimalLonePacket;
    return res;
  }

  const auto edges = candidate_edges(prob);
  const double inf = std::numeric_limits<double>::infinity();

  Spt best = shortest_path_tree(build_graph(prob, edges, inf), res.budget.h_max);
  if (!best.connected || !best.hop_ok) {
    res.status = DesignStatus::kInfeasible;
    std::ostringstream note;
    if (!best.connected)
      note << "candidate graph does not connect every node to the BS";
    else
      note << "minimum-hop tree needs " << best.max_hops << " hops > budget "
           << res.budget.h_max;
    res.trace.push_back(
        {0, best.w_max, best.max_hops, best.hop_ok, false, 0.0, 1.0, note.str()});
    return res;
  }

  int step = 0;
  while (true) {
    res.trace.push_back({step, best.w_max, best.max_hops, true, false, 0.0, 1.0,
                         "tree accepted; pruning edges of this length and up"});
    // Admit only edges strictly shorter than the current longest tree edge.
    double next_cap = 0.0;
    for (const auto& e : edges)
      if (e.length < best.w_max) next_cap = std::max(next_cap, e.length);
    if (next_cap <= 0.0) break;

    Spt trial =
        shortest_path_tree(build_graph(prob, edges, next_cap), res.budget.h_max);
    ++step;
    if (!trial.connected || !trial.hop_ok) {
      std::ostringstream note;
      note << "capping edges at " << next_cap << " m "
           << (trial.connected ? "exceeds the hop budget" : "disconnects the graph")
           << "; previous tree is optimal";
      res.trace.push_back({step, trial.w_max, trial.max_hops, trial.hop_ok,
                           false, 0.0, 1.0, note.str()});
      break;
    }
    best = trial;
  }

  res.status = DesignStatus::kOptimalLonePacket;
  res.parent = best.parent;
  res.max_edge = best.w_max;
  res.max_hops = best.max_hops;
  return res;
}

Scenario scenario_from_tree(const DesignProblem& prob,
                            const std::map<int, int>& parent,
                            const ProtocolParams& p) {
  Scenario s;
  s.protocol = p;
  s.model.name = "designed-tree";
  s.model.bs_id = prob.bs.id;

  std::map<std::pair<int, int>, double> edge_per;
  for (const auto& e : candidate_edges(prob)) {
    const double val = e.per >= 0.0 ? e.per : prob.qos.per;
    edge_per[{std::min(e.a, e.b), std::max(e.a, e.b)}] = val;
  }

  NodeSpec bs;
  bs.id = prob.bs.id;
  bs.x = prob.bs.x;
  bs.y = prob.bs.y;
  bs.role = NodeRole::kBs;
  s.model.nodes.push_back(bs);
  for (const auto& nd : prob.nodes) {
    NodeSpec n;
    n.id = nd.id;
    n.x = nd.x;
    n.y = nd.y;
    n.role = NodeRole::kSource;
    n.lambda_pps = prob.qos.lambda_pps;
    const int pid = parent.at(nd.id);
    auto it = edge_per.find({std::min(nd.id, pid), std::max(nd.id, pid)});
    n.link_per = it != edge_per.end() ? it->second : prob.qos.per;
    s.model.nodes.push_back(n);
  }
  s.model.parent = parent;

  // Designed networks run at minimum common power: everyone hears everyone.
  std::map<int, std::vector<int>> cs;
  for (const auto& a : s.model.nodes) {
    std::vector<int>& lst = cs[a.id];
    for (const auto& b : s.model.nodes)
      if (b.id != a.id) lst.push_back(b.id);
  }
  s.model.explicit_cs = std::move(cs);
  return s;
}

namespace {

LoadCheck check_under_load(const DesignProblem& prob,
                           const std::map<int, int>& parent,
                           const ProtocolParams& p, const AnalysisConfig& cfg) {
  LoadCheck lc;
  Scenario sc = scenario_from_tree(prob, parent, p);
  Neighborhoods nb = derive_neighborhoods(sc.model);
  FixedPointResult fp;
  try {
    fp = solve(sc.model, nb, sc.protocol, cfg);
  } catch (const SolverError&) {
    return lc;  // treat a solver breakdown as a failed candidate
  }
  lc.converged = fp.converged;
  if (!fp.converged) return lc;

  QnaReport rep = qna_delay(sc.model, nb, fp, sc.protocol);
  lc.pass = true;
  for (const auto& src : rep.sources) {
    const double d_ms = std::isinf(src.delay_symbols)
                            ? std::numeric_limits<double>::infinity()
                            : units::symbols_to_ms(src.delay_symbols);
    lc.delay_worst_ms = std::max(lc.delay_worst_ms, d_ms);
    lc.p_del_worst = std::min(lc.p_del_worst, src.p_delivery);
  }
  if (rep.any_overloaded || lc.delay_worst_ms > prob.qos.d_max_ms ||
      lc.p_del_worst < prob.qos.p_del)
    lc.pass = false;
  return lc;
}

}  // namespace

DesignResult design_min_power_loaded(const DesignProblem& prob,
                                     const ProtocolParams& p,
                                     const AnalysisConfig& cfg) {
  DesignResult res = design_min_power(prob, p);
  if (res.status == DesignStatus::kInfeasible) return res;
  if (prob.qos.lambda_pps <= 0.0 || prob.nodes.empty()) return res;

  const auto edges = candidate_edges(prob);

  // Distinct candidate caps: the optimal lone-packet tree first, then every
  // longer admitted length in increasing order.
  std::set<double> caps;
  for (const auto& e : edges)
    if (e.length > res.max_edge) caps.insert(e.length);

  std::set<std::map<int, int>> examined;
  std::map<int, int> tree = res.parent;
  double w_max = res.max_edge;
  int max_hops = res.max_hops;
  int step = static_cast<int>(res.trace.size());

  auto consider = [&](const std::map<int, int>& cand, double w, int hops,
                      const std::string& how) -> bool {
    if (!examined.insert(cand).second) return false;  // same tree as before
    LoadCheck lc = check_under_load(prob, cand, p, cfg);
    res.trace.push_back({step++, w, hops, true, lc.pass,
                         lc.delay_worst_ms, lc.p_del_worst,
                         how + (lc.pass ? ": passes loaded QoS"
                                        : ": fails loaded QoS")});
    if (lc.pass) {
      res.status = DesignStatus::kFeasiblePositiveLoad;
      res.parent = cand;
      res.max_edge = w;
      res.max_hops = hops;
      res.load_check = lc;
    } else if (!res.load_check) {
      res.load_check = lc;  // remember the first (best-power) verdict
    }
    return lc.pass;
  };

  if (consider(tree, w_max, max_hops, "minimum-power tree")) return res;

  for (double cap : caps) {
    Spt t = shortest_path_tree(build_graph(prob, edges, cap), res.budget.h_max);
    // Supersets of a feasible graph stay connected and can only shorten
    // hop counts, so the budget still holds.
    if (!t.connected || !t.hop_ok) continue;
    std::ostringstream how;
    how << "re-admitted edges up to " << cap << " m";
    if (consider(t.parent, t.w_max, t.max_hops, how.str())) return res;
  }

  res.status = DesignStatus::kPossiblyInfeasible;
  return res;
}

DesignProblem make_lattice_problem(int n_sources, uint64_t seed,
                                   const QosSpec& qos, double area_m,
                                   double cell_m) {
  if (cell_m <= 0.0 || area_m <= 0.0 || cell_m > area_m)
    throw std::invalid_argument("make_lattice_problem: bad geometry");
  const int per_side = static_cast<int>(std::floor(area_m / cell_m + 1e-9)) + 1;
  std::vector<DesignNode> grid;
  for (int i = 0; i < per_side; ++i)
    for (int j = 0; j < per_side; ++j)
      grid.push_back({0, i * cell_m, j * cell_m});
  // BS takes the origin corner; sources draw from the remaining points.
  std::vector<DesignNode> pool;
  for (const auto& g : grid)
    if (!(g.x == 0.0 && g.y == 0.0)) pool.push_back(g);
  if (n_sources < 1 || n_sources > static_cast<int>(pool.size()))
    throw std::invalid_argument(
        "make_lattice_problem: n_sources must be in [1," +
        std::to_string(pool.size()) + "]");

  Rng rng(seed);
  for (int k = 0; k < n_sources; ++k) {
    const int j = k + static_cast<int>(rng.uniform_below(pool.size() - k));
    std::swap(pool[k], pool[j]);
  }

  DesignProblem prob;
  prob.qos = qos;
  prob.bs = {0, 0.0, 0.0};
  for (int k = 0; k < n_sources; ++k) {
    DesignNode nd = pool[k];
    nd.id = k + 1;
    prob.nodes.push_back(nd);
  }
  return prob;
}

}  // namespace wpan
