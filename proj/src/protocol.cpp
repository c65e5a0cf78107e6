#include "wpan/protocol.hpp"

namespace wpan {

std::vector<std::string> ProtocolParams::validate() const {
  std::vector<std::string> errs;
  if (slot_symbols <= 0) errs.push_back("slot_symbols must be positive");
  if (cca_symbols <= 0) errs.push_back("cca_symbols must be positive");
  if (turnaround_symbols < 0) errs.push_back("turnaround_symbols must be >= 0");
  if (ack_symbols <= 0) errs.push_back("ack_symbols must be positive");
  if (ack_wait_symbols < ack_symbols)
    errs.push_back("ack_wait_symbols must cover the ACK frame");
  if (mac_min_be < 0 || mac_min_be > mac_max_be)
    errs.push_back("require 0 <= mac_min_be <= mac_max_be");
  if (mac_max_be > 14) errs.push_back("mac_max_be too large");
  if (max_csma_backoffs < 0) errs.push_back("max_csma_backoffs must be >= 0");
  if (max_frame_retries < 0) errs.push_back("max_frame_retries must be >= 0");
  if (data_tx_symbols <= 0) errs.push_back("data_tx_symbols must be positive");
  return errs;
}

void require_valid(const ProtocolParams& p) {
  auto errs = p.validate();
  if (errs.empty()) return;
  std::string msg = "invalid protocol parameters:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw std::invalid_argument(msg);
}

}  // namespace wpan
