#include "wpan/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace wpan {

std::string to_string(NodeRole r) {
  switch (r) {
    case NodeRole::kBs: return "bs";
    case NodeRole::kSource: return "source";
    case NodeRole::kRelay: return "relay";
  }
  return "?";
}

NodeRole role_from_string(const std::string& s) {
  if (s == "bs") return NodeRole::kBs;
  if (s == "source") return NodeRole::kSource;
  if (s == "relay") return NodeRole::kRelay;
  throw std::invalid_argument("unknown node role: " + s);
}

ValidationError::ValidationError(const std::vector<std::string>& errs)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "invalid scenario (" << errs.size() << " problem"
           << (errs.size() == 1 ? "" : "s") << "):";
        for (const auto& e : errs) os << "\n  - " << e;
        return os.str();
      }()),
      errors(errs) {}

void require_valid(const NetworkModel& m) {
  auto errs = validate(m);
  if (!errs.empty()) throw ValidationError(errs);
}

namespace {

double dist(const NodeSpec& a, const NodeSpec& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// CS membership by id, honoring explicit sets over the range rule.
bool in_cs(const NetworkModel& m, const NodeSpec& a, const NodeSpec& b) {
  if (m.explicit_cs) {
    auto it = m.explicit_cs->find(a.id);
    if (it == m.explicit_cs->end()) return false;
    return std::find(it->second.begin(), it->second.end(), b.id) != it->second.end();
  }
  return dist(a, b) <= *m.cs_range_m;
}

}  // namespace

std::vector<std::string> validate(const NetworkModel& m) {
  std::vector<std::string> errs;
  auto err = [&](const std::string& s) { errs.push_back(s); };

  if (m.nodes.empty()) {
    err("scenario has no nodes");
    return errs;
  }

  std::map<int, const NodeSpec*> by_id;
  for (const auto& n : m.nodes) {
    if (by_id.count(n.id)) err("duplicate node id " + std::to_string(n.id));
    by_id[n.id] = &n;
    if (!std::isfinite(n.x) || !std::isfinite(n.y))
      err("node " + std::to_string(n.id) + " has non-finite coordinates");
    if (n.lambda_pps < 0 || !std::isfinite(n.lambda_pps))
      err("node " + std::to_string(n.id) + " has invalid lambda_pps");
    if (n.link_per < 0.0 || n.link_per > 1.0 || !std::isfinite(n.link_per))
      err("node " + std::to_string(n.id) + " has link_per outside [0,1]");
    if (n.role == NodeRole::kRelay && n.lambda_pps != 0.0)
      err("relay node " + std::to_string(n.id) + " must have lambda_pps = 0");
    if (n.role == NodeRole::kBs && n.lambda_pps != 0.0)
      err("BS node " + std::to_string(n.id) + " must have lambda_pps = 0");
  }

  int n_bs = 0;
  for (const auto& n : m.nodes)
    if (n.role == NodeRole::kBs) ++n_bs;
  if (n_bs != 1) err("scenario must contain exactly one node with role 'bs'");
  auto bs_it = by_id.find(m.bs_id);
  if (bs_it == by_id.end())
    err("bs_id " + std::to_string(m.bs_id) + " is not a node id");
  else if (bs_it->second->role != NodeRole::kBs)
    err("bs_id " + std::to_string(m.bs_id) + " does not have role 'bs'");

  // Routing tree: every non-BS node has a parent, parents exist, the
  // parent graph is acyclic and reaches the BS.
  for (const auto& n : m.nodes) {
    if (n.id == m.bs_id) {
      if (m.parent.count(n.id)) err("BS must not have a parent entry");
      continue;
    }
    auto it = m.parent.find(n.id);
    if (it == m.parent.end()) {
      err("node " + std::to_string(n.id) + " has no parent entry");
      continue;
    }
    if (!by_id.count(it->second))
      err("node " + std::to_string(n.id) + " has unknown parent " +
          std::to_string(it->second));
    if (it->second == n.id)
      err("node " + std::to_string(n.id) + " is its own parent");
  }
  for (const auto& [id, pid] : m.parent)
    if (!by_id.count(id))
      err("parent map mentions unknown node " + std::to_string(id));

  // Walk up from every node; a walk longer than the node count is a cycle.
  for (const auto& n : m.nodes) {
    if (n.id == m.bs_id) continue;
    int cur = n.id;
    int steps = 0;
    bool broken = false;
    while (cur != m.bs_id) {
      auto it = m.parent.find(cur);
      if (it == m.parent.end() || !by_id.count(it->second)) {
        broken = true;  // already reported above
        break;
      }
      cur = it->second;
      if (++steps > m.size()) {
        err("parent pointers of node " + std::to_string(n.id) +
            " form a cycle (routing graph is not a tree)");
        broken = true;
        break;
      }
    }
    (void)broken;
  }

  // Carrier-sense specification.
  if (!m.cs_range_m && !m.explicit_cs) {
    err("scenario needs cs_range_m or cs_sets");
    return errs;
  }
  if (m.cs_range_m && *m.cs_range_m <= 0) err("cs_range_m must be positive");
  if (m.explicit_cs) {
    for (const auto& n : m.nodes)
      if (!m.explicit_cs->count(n.id))
        err("cs_sets missing entry for node " + std::to_string(n.id));
    for (const auto& [id, set] : *m.explicit_cs) {
      if (!by_id.count(id)) {
        err("cs_sets mentions unknown node " + std::to_string(id));
        continue;
      }
      std::set<int> seen;
      for (int other : set) {
        if (other == id) err("cs_sets: node " + std::to_string(id) + " lists itself");
        if (!by_id.count(other)) {
          err("cs_sets: node " + std::to_string(id) + " lists unknown node " +
              std::to_string(other));
          continue;
        }
        if (!seen.insert(other).second)
          err("cs_sets: node " + std::to_string(id) + " lists node " +
              std::to_string(other) + " twice");
        auto jt = m.explicit_cs->find(other);
        bool sym = jt != m.explicit_cs->end() &&
                   std::find(jt->second.begin(), jt->second.end(), id) != jt->second.end();
        if (!sym)
          err("cs_sets not symmetric: " + std::to_string(id) + " hears " +
              std::to_string(other) + " but not vice versa");
      }
    }
  }

  // A node must be able to carrier-sense its parent: tree links are
  // communication links and communication range is within CS range.
  for (const auto& [id, pid] : m.parent) {
    auto a = by_id.find(id);
    auto b = by_id.find(pid);
    if (a == by_id.end() || b == by_id.end()) continue;
    if (!in_cs(m, *a->second, *b->second))
      err("node " + std::to_string(id) + " cannot carrier-sense its parent " +
          std::to_string(pid));
  }

  return errs;
}

Neighborhoods derive_neighborhoods(const NetworkModel& m) {
  require_valid(m);
  Neighborhoods nb;
  const int n = m.size();
  nb.ids.resize(n);
  for (int i = 0; i < n; ++i) {
    nb.ids[i] = m.nodes[i].id;
    nb.index_of[m.nodes[i].id] = i;
  }
  nb.bs = nb.index_of.at(m.bs_id);

  nb.omega.assign(n, {});
  nb.in_omega.assign(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (in_cs(m, m.nodes[i], m.nodes[j])) {
        nb.omega[i].push_back(j);
        nb.in_omega[i][j] = 1;
      }
    }

  nb.parent.assign(n, -1);
  nb.children.assign(n, {});
  for (const auto& [id, pid] : m.parent) {
    int i = nb.index_of.at(id);
    int p = nb.index_of.at(pid);
    nb.parent[i] = p;
    nb.children[p].push_back(i);
  }

  nb.depth.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    int cur = i, d = 0;
    while (nb.parent[cur] != -1) {
      cur = nb.parent[cur];
      ++d;
    }
    nb.depth[i] = d;
  }

  // Interferer split for each transmitter i toward its receiver r = parent.
  // The interferers of r are everything r hears plus r itself, minus i.
  nb.c1.assign(n, {});
  nb.c2.assign(n, {});
  for (int i = 0; i < n; ++i) {
    int r = nb.parent[i];
    if (r == -1) continue;
    for (int j : nb.omega[r]) {
      if (j == i) continue;
      if (nb.in_omega[i][j])
        nb.c1[i].push_back(j);
      else
        nb.c2[i].push_back(j);
    }
    // r itself interferes at r and is always heard by i (validated).
    nb.c1[i].push_back(r);
    std::sort(nb.c1[i].begin(), nb.c1[i].end());
  }

  // Children-first order over non-BS nodes: sort by depth, deepest first.
  for (int i = 0; i < n; ++i)
    if (i != nb.bs) nb.order_leaf_to_root.push_back(i);
  std::stable_sort(nb.order_leaf_to_root.begin(), nb.order_leaf_to_root.end(),
                   [&](int a, int b) { return nb.depth[a] > nb.depth[b]; });
  return nb;
}

bool Neighborhoods::hidden_free() const {
  for (size_t i = 0; i < c2.size(); ++i)
    if (parent[i] != -1 && !c2[i].empty()) return false;
  return true;
}

}  // namespace wpan
