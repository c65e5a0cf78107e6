#include "wpan/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wpan/rng.hpp"

namespace wpan {

namespace {

double dist(const NodeSpec& a, const NodeSpec& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Smallest radius whose mean neighbor count reaches the target, computed
// from the sorted pair distances.
double radius_for_degree(const std::vector<NodeSpec>& nodes, double target) {
  const int n = static_cast<int>(nodes.size());
  std::vector<double> d;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d.push_back(dist(nodes[i], nodes[j]));
  std::sort(d.begin(), d.end());
  // k admitted pairs produce 2k directed neighbor relations over n nodes.
  const int need = static_cast<int>(std::ceil(target * n / 2.0));
  if (need <= 0) return d.front();
  if (need > static_cast<int>(d.size())) return d.back();
  return d[need - 1];
}

// Minimum radius connecting every node to the BS (index 0), found on the
// sorted distances by binary search.
double radius_for_connectivity(const std::vector<NodeSpec>& nodes) {
  const int n = static_cast<int>(nodes.size());
  std::vector<double> d;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d.push_back(dist(nodes[i], nodes[j]));
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());

  auto connected = [&](double r) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int cnt = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v)
        if (!seen[v] && dist(nodes[u], nodes[v]) <= r) {
          seen[v] = 1;
          ++cnt;
          stack.push_back(v);
        }
    }
    return cnt == n;
  };

  size_t lo = 0, hi = d.size() - 1;
  if (!connected(d[hi]))
    throw std::runtime_error("deployment cannot be connected");  // unreachable
  while (lo < hi) {
    const size_t mid = (lo + hi) / 2;
    if (connected(d[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return d[lo];
}

}  // namespace

Scenario gen_tree_scenario(int n_sources, double cs_target, double link_per,
                           double lambda_pps, uint64_t seed, double area_m) {
  if (n_sources < 1) throw std::invalid_argument("gen_tree_scenario: n_sources < 1");
  Rng rng(seed);
  Scenario s;

  NodeSpec bs;
  bs.id = 0;
  bs.x = area_m / 2.0;
  bs.y = area_m / 2.0;
  bs.role = NodeRole::kBs;
  s.model.nodes.push_back(bs);
  for (int i = 1; i <= n_sources; ++i) {
    NodeSpec nd;
    nd.id = i;
    nd.x = rng.uniform01() * area_m;
    nd.y = rng.uniform01() * area_m;
    nd.role = NodeRole::kSource;
    nd.lambda_pps = lambda_pps;
    nd.link_per = link_per;
    s.model.nodes.push_back(nd);
  }

  const double r_deg = radius_for_degree(s.model.nodes, cs_target);
  const double r_con = radius_for_connectivity(s.model.nodes);
  s.model.cs_range_m = std::max(r_deg, r_con);

  // Hop-count tree over the CS links: parent = nearest neighbor one level
  // closer to the BS.
  const int n = static_cast<int>(s.model.nodes.size());
  std::vector<int> depth(n, -1);
  depth[0] = 0;
  std::vector<int> frontier{0};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int u : frontier)
      for (int v = 0; v < n; ++v)
        if (depth[v] < 0 && dist(s.model.nodes[u], s.model.nodes[v]) <= *s.model.cs_range_m) {
          depth[v] = depth[u] + 1;
          next.push_back(v);
        }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  for (int v = 1; v < n; ++v) {
    int best = -1;
    double best_d = 0.0;
    for (int u = 0; u < n; ++u) {
      if (u == v || depth[u] != depth[v] - 1) continue;
      const double d = dist(s.model.nodes[u], s.model.nodes[v]);
      if (d > *s.model.cs_range_m) continue;
      if (best < 0 || d < best_d) {
        best = u;
        best_d = d;
      }
    }
    s.model.parent[s.model.nodes[v].id] = s.model.nodes[best].id;
  }

  std::ostringstream name;
  name << "tree-n" << n_sources << "-CS" << cs_target << "-PER" << link_per
       << "-seed" << seed;
  s.model.name = name.str();
  s.model.bs_id = 0;
  require_valid(s.model);
  return s;
}

Scenario gen_star_scenario(int n_sources, int cs_target, double link_per,
                           double lambda_pps, double radius_m) {
  if (n_sources < 2) throw std::invalid_argument("gen_star_scenario: need >= 2 sources");
  if (cs_target % 2 == 0 || cs_target < 1 || cs_target > n_sources)
    throw std::invalid_argument(
        "gen_star_scenario: cs_target must be odd (ring pairs plus the BS) "
        "and at most n_sources");
  const int k = (cs_target - 1) / 2;  // ring neighbors heard on each side

  Scenario s;
  NodeSpec bs;
  bs.id = 0;
  bs.role = NodeRole::kBs;
  s.model.nodes.push_back(bs);
  for (int i = 1; i <= n_sources; ++i) {
    const double ang = 2.0 * M_PI * (i - 1) / n_sources;
    NodeSpec nd;
    nd.id = i;
    nd.x = radius_m * std::cos(ang);
    nd.y = radius_m * std::sin(ang);
    nd.role = NodeRole::kSource;
    nd.lambda_pps = lambda_pps;
    nd.link_per = link_per;
    s.model.nodes.push_back(nd);
    s.model.parent[i] = 0;
  }

  // Explicit CS sets: exact degree regardless of chord-length rounding.
  std::map<int, std::vector<int>> cs;
  cs[0] = {};
  for (int i = 1; i <= n_sources; ++i) cs[0].push_back(i);
  for (int i = 1; i <= n_sources; ++i) {
    std::vector<int>& lst = cs[i];
    lst.push_back(0);
    for (int off = 1; off <= k; ++off) {
      lst.push_back((i - 1 + off) % n_sources + 1);
      lst.push_back((i - 1 - off + n_sources) % n_sources + 1);
    }
    std::sort(lst.begin(), lst.end());
    lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
  }
  s.model.explicit_cs = std::move(cs);

  std::ostringstream name;
  name << "star-n" << n_sources << "-CS" << cs_target;
  s.model.name = name.str();
  s.model.bs_id = 0;
  require_valid(s.model);
  return s;
}

Scenario gen_line_scenario(int n_sources, int cs_reach, double link_per,
                           double lambda_pps, double spacing_m) {
  if (n_sources < 1) throw std::invalid_argument("gen_line_scenario: n_sources < 1");
  if (cs_reach < 1) throw std::invalid_argument("gen_line_scenario: cs_reach < 1");
  Scenario s;
  for (int i = 0; i <= n_sources; ++i) {
    NodeSpec nd;
    nd.id = i;
    nd.x = i * spacing_m;
    nd.role = i == 0 ? NodeRole::kBs : NodeRole::kSource;
    nd.lambda_pps = i == 0 ? 0.0 : lambda_pps;
    nd.link_per = i == 0 ? 0.0 : link_per;
    s.model.nodes.push_back(nd);
    if (i > 0) s.model.parent[i] = i - 1;
  }
  s.model.cs_range_m = (cs_reach + 0.5) * spacing_m;
  std::ostringstream name;
  name << "line-n" << n_sources << "-CS" << cs_reach;
  s.model.name = name.str();
  s.model.bs_id = 0;
  require_valid(s.model);
  return s;
}

}  // namespace wpan
