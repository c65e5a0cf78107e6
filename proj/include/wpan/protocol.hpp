#pragma once

#include <stdexcept>
#include <string>
#include <vector>

// Unslotted (beaconless) IEEE 802.15.4 CSMA/CA MAC parameters.  All
// durations are in symbol periods; see units.hpp.

namespace wpan {

struct ProtocolParams {
  int slot_symbols = 20;        // aUnitBackoffPeriod
  int cca_symbols = 8;          // CCA duration
  int turnaround_symbols = 12;  // Rx-to-Tx turnaround
  int ack_symbols = 22;         // ACK frame duration
  int ack_wait_symbols = 34;    // turnaround + ACK, budgeted after the data frame

  int mac_min_be = 3;
  int mac_max_be = 5;
  int max_csma_backoffs = 4;   // CCA attempts per transmission = this + 1
  int max_frame_retries = 3;   // transmissions per packet = this + 1

  int data_tx_symbols = 260;   // T_x: PHY data frame duration
  bool acks_enabled = true;

  // Channel occupancy of one transmission attempt as seen by the MAC:
  // data frame plus, when acknowledged, the turnaround + ACK window.
  int tx_period() const {
    return data_tx_symbols + (acks_enabled ? ack_wait_symbols : 0);
  }

  int cca_attempts() const { return max_csma_backoffs + 1; }
  int transmissions() const { return acks_enabled ? max_frame_retries + 1 : 1; }

  int backoff_exponent(int stage) const {
    int be = mac_min_be + stage;
    return be < mac_max_be ? be : mac_max_be;
  }

  // Number of backoff slots drawn for the given stage: uniform over
  // [0, 2^BE - 1].
  int backoff_window(int stage) const { return 1 << backoff_exponent(stage); }

  // Mean backoff duration of the given stage, in symbols.
  double mean_backoff_symbols(int stage) const {
    return (backoff_window(stage) - 1) * 0.5 * slot_symbols;
  }

  std::vector<std::string> validate() const;
};

// Throws std::invalid_argument listing every violated constraint.
void require_valid(const ProtocolParams& p);

}  // namespace wpan
