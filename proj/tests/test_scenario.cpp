#include <doctest.h>

#include <string>

#include "wpan/scenario.hpp"
#include "wpan/scenario_gen.hpp"

using namespace wpan;

TEST_CASE("generated scenario survives a serialize-parse round trip") {
  const Scenario a = gen_star_scenario(20, 9, 0.02, 1.5, 12.0);
  const Scenario b = parse_scenario(scenario_to_json(a));
  CHECK(b.model.name == a.model.name);
  REQUIRE(b.model.size() == a.model.size());
  for (int i = 0; i < a.model.size(); ++i) {
    CHECK(b.model.nodes[i].id == a.model.nodes[i].id);
    CHECK(b.model.nodes[i].x == a.model.nodes[i].x);
    CHECK(b.model.nodes[i].y == a.model.nodes[i].y);
    CHECK(b.model.nodes[i].role == a.model.nodes[i].role);
    CHECK(b.model.nodes[i].lambda_pps == a.model.nodes[i].lambda_pps);
    CHECK(b.model.nodes[i].link_per == a.model.nodes[i].link_per);
  }
  CHECK(b.model.parent == a.model.parent);
  REQUIRE(a.model.explicit_cs.has_value());
  REQUIRE(b.model.explicit_cs.has_value());
  CHECK(*b.model.explicit_cs == *a.model.explicit_cs);
  // And a second round trip is byte-stable.
  CHECK(scenario_to_json(b) == scenario_to_json(a));
}

TEST_CASE("protocol and analysis blocks are optional and default cleanly") {
  const std::string text = R"({
    "name": "two",
    "bs_id": 0,
    "cs_range_m": 50.0,
    "nodes": [
      {"id": 0, "x": 0, "y": 0, "role": "bs", "lambda_pps": 0, "link_per": 0},
      {"id": 1, "x": 10, "y": 0, "role": "source", "lambda_pps": 2.0,
       "link_per": 0.05}
    ],
    "parent": {"1": 0}
  })";
  const Scenario sc = parse_scenario(text);
  CHECK(sc.protocol.data_tx_symbols == 260);
  CHECK(sc.protocol.acks_enabled);
  CHECK(sc.analysis.tol == 1e-6);
  CHECK(sc.analysis.teff_model == TeffModel::kBoorstyn);
  CHECK(sc.model.nodes[1].lambda_pps == 2.0);
}

TEST_CASE("non-default knobs survive the round trip") {
  Scenario sc = gen_line_scenario(4, 1, 0.0, 0.5);
  sc.protocol.acks_enabled = false;
  sc.protocol.data_tx_symbols = 174;
  sc.analysis.teff_model = TeffModel::kMdInfinity;
  sc.analysis.damping = 0.25;
  const Scenario back = parse_scenario(scenario_to_json(sc));
  CHECK_FALSE(back.protocol.acks_enabled);
  CHECK(back.protocol.data_tx_symbols == 174);
  CHECK(back.analysis.teff_model == TeffModel::kMdInfinity);
  CHECK(back.analysis.damping == 0.25);
}

TEST_CASE("malformed JSON raises a format error") {
  CHECK_THROWS_AS(parse_scenario("{not json"), ScenarioFormatError);
  CHECK_THROWS_AS(parse_scenario(R"({"name": 3})"), ScenarioFormatError);
}

TEST_CASE("structurally invalid scenario raises the validation error") {
  const std::string text = R"({
    "name": "cycle",
    "bs_id": 0,
    "cs_range_m": 50.0,
    "nodes": [
      {"id": 0, "x": 0, "y": 0, "role": "bs", "lambda_pps": 0, "link_per": 0},
      {"id": 1, "x": 10, "y": 0, "role": "source", "lambda_pps": 1, "link_per": 0},
      {"id": 2, "x": 20, "y": 0, "role": "source", "lambda_pps": 1, "link_per": 0}
    ],
    "parent": {"1": 2, "2": 1}
  })";
  CHECK_THROWS_AS(parse_scenario(text), ValidationError);
}

TEST_CASE("scenario families have the advertised shapes") {
  const Scenario tree = gen_tree_scenario(10, 3.0, 0.01, 1.0, 5);
  CHECK(tree.model.size() == 11);
  CHECK(tree.model.name == "tree-n10-CS3-PER0.01-seed5");
  CHECK(validate(tree.model).empty());

  const Scenario star = gen_star_scenario(6, 3, 0.01, 2.0);
  CHECK(star.model.size() == 7);
  for (const auto& [child, parent] : star.model.parent) CHECK(parent == 0);
  // Ring symmetry: every source hears the BS plus one neighbor each way.
  const Neighborhoods nb = derive_neighborhoods(star.model);
  for (int i = 0; i < star.model.size(); ++i)
    if (i != nb.bs) CHECK(nb.omega[i].size() == 3);
  CHECK_THROWS(gen_star_scenario(6, 4, 0.01, 2.0));  // even degree impossible

  const Scenario line = gen_line_scenario(5, 1, 0.0, 1.0);
  CHECK(line.model.size() == 6);
  const Neighborhoods lb = derive_neighborhoods(line.model);
  // reach 1: interior nodes hear exactly their two chain neighbors
  CHECK(lb.omega[lb.index_of.at(2)].size() == 2);
  CHECK(lb.omega[lb.index_of.at(5)].size() == 1);
}

TEST_CASE("same seed reproduces the same scenario") {
  const Scenario a = gen_tree_scenario(15, 4.0, 0.01, 1.0, 77);
  const Scenario b = gen_tree_scenario(15, 4.0, 0.01, 1.0, 77);
  CHECK(scenario_to_json(a) == scenario_to_json(b));
  const Scenario c = gen_tree_scenario(15, 4.0, 0.01, 1.0, 78);
  CHECK(scenario_to_json(a) != scenario_to_json(c));
}
