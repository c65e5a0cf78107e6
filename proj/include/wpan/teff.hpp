#pragma once

#include <vector>

// Models for the effective channel-occupancy time a blocked node waits out:
// the busy period started by one interfering transmission, as seen by a
// node whose own attempt clock is frozen while the channel is busy.

namespace wpan {

// Busy period of an M/D/inf system: transmissions of duration t_tx arrive
// at rate zeta (per symbol) and overlap freely.  Exact mean
// (e^(zeta*t_tx) - 1) / zeta, with a series fallback for tiny exponents.
double teff_md_infinity(double zeta, double t_tx);

// Busy period seen by a tagged node in a CSMA clique model: neighbors
// j = 0..m-1 attempt at rate tau[j], the tagged node at rate beta, all
// transmissions last t_tx, and two neighbors can overlap only when they do
// not hear each other (conflict[j][k] false).  conflict is m x m, symmetric;
// the tagged node conflicts with every neighbor by construction.  The mean
// busy period is recovered from the stationary idle probability of the
// product-form occupancy distribution.  Throws std::invalid_argument when
// m > 25 (independent-set enumeration would be too large).
double teff_boorstyn(double beta, const std::vector<double>& tau,
                     const std::vector<std::vector<char>>& conflict,
                     double t_tx);

}  // namespace wpan
