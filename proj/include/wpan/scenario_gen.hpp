#pragma once

#include <cstdint>

#include "wpan/designer.hpp"
#include "wpan/scenario.hpp"

// Reproducible scenario families.  `cs_target` follows the "CSm" naming:
// the intended number of nodes (the BS counts) within carrier-sense range
// of a typical source.

namespace wpan {

// Random flat deployment in a square, BS in the middle, hop-count tree over
// the links the carrier-sense radius admits.  The radius is chosen so the
// mean CS degree approximates cs_target, then grown just enough to keep
// the deployment connected.  All nodes are sources.
Scenario gen_tree_scenario(int n_sources, double cs_target, double link_per,
                           double lambda_pps, uint64_t seed,
                           double area_m = 100.0);

// n sources on a circle around the BS, all transmitting straight to it.
// cs_target must be odd: a node hears (cs_target-1)/2 ring neighbors each
// way plus the BS.
Scenario gen_star_scenario(int n_sources, int cs_target, double link_per,
                           double lambda_pps, double radius_m = 10.0);

// Chain: BS at one end, each node forwards through the previous one, and a
// node hears cs_reach chain neighbors on each side.
Scenario gen_line_scenario(int n_sources, int cs_reach, double link_per,
                           double lambda_pps, double spacing_m = 10.0);

// Design instance on the 50 m lattice wrapped as a ready-to-run scenario is
// provided by the designer module (make_lattice_problem + scenario_from_tree).

}  // namespace wpan
