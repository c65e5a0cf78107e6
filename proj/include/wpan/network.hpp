#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Static description of a convergecast tree: node placement, roles,
// per-link packet error rates, the routing tree, and the carrier-sense
// relationship.  Carrier sense can be given either as a range (symmetric by
// construction) or as explicit per-node sets; explicit sets win.

namespace wpan {

enum class NodeRole { kBs, kSource, kRelay };

std::string to_string(NodeRole r);
NodeRole role_from_string(const std::string& s);

struct NodeSpec {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  NodeRole role = NodeRole::kSource;
  double lambda_pps = 0.0;  // external packet generation rate
  double link_per = 0.0;    // PER of the link toward the parent
};

struct NetworkModel {
  std::string name;
  std::vector<NodeSpec> nodes;  // includes the base station
  int bs_id = 0;
  std::map<int, int> parent;    // node id -> parent id, for every non-BS node
  std::optional<double> cs_range_m;
  std::optional<std::map<int, std::vector<int>>> explicit_cs;

  int size() const { return static_cast<int>(nodes.size()); }
};

// Every violated structural constraint, one message each; empty means valid.
std::vector<std::string> validate(const NetworkModel& m);

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::vector<std::string>& errs);
  std::vector<std::string> errors;
};

void require_valid(const NetworkModel& m);  // throws ValidationError

// Carrier-sense and interference structure derived from a valid model.
// Everything below is indexed by dense node index (position in m.nodes).
struct Neighborhoods {
  std::vector<int> ids;                      // dense index -> node id
  std::map<int, int> index_of;               // node id -> dense index
  int bs = 0;                                // dense index of the BS

  std::vector<std::vector<int>> omega;       // CS set, sorted, excludes self
  std::vector<std::vector<char>> in_omega;   // adjacency matrix of omega
  std::vector<int> parent;                   // dense; -1 for the BS
  std::vector<std::vector<int>> children;    // dense
  std::vector<int> depth;                    // hops to the BS; 0 for the BS

  // For each non-BS node i, the interferers of its receiver r(i), split
  // into the part i can hear (c1, always containing r(i)) and the part
  // hidden from i (c2).  Empty vectors for the BS entry.
  std::vector<std::vector<int>> c1;
  std::vector<std::vector<int>> c2;

  std::vector<int> order_leaf_to_root;       // non-BS nodes, children first

  bool hidden_free() const;                  // all c2 empty
};

Neighborhoods derive_neighborhoods(const NetworkModel& m);

}  // namespace wpan
