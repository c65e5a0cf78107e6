#include <doctest.h>

#include <stdexcept>

#include "wpan/protocol.hpp"
#include "wpan/units.hpp"

using namespace wpan;

TEST_CASE("default MAC timing constants") {
  ProtocolParams p;
  CHECK(p.slot_symbols == 20);
  CHECK(p.cca_symbols == 8);
  CHECK(p.turnaround_symbols == 12);
  CHECK(p.ack_wait_symbols == 34);
  CHECK(p.cca_attempts() == 5);
  CHECK(p.transmissions() == 4);
  // Activity period: data plus the acknowledgement wait.
  CHECK(p.tx_period() == 260 + 34);
  ProtocolParams q = p;
  q.acks_enabled = false;
  CHECK(q.tx_period() == 260);
  CHECK(q.transmissions() == 1);  // sender can never learn of a loss
}

TEST_CASE("backoff window doubles then saturates: 3,4,5,5,5") {
  ProtocolParams p;
  CHECK(p.backoff_window(0) == 8);
  CHECK(p.backoff_window(1) == 16);
  CHECK(p.backoff_window(2) == 32);
  CHECK(p.backoff_window(3) == 32);
  CHECK(p.backoff_window(4) == 32);
  CHECK(p.mean_backoff_symbols(0) == doctest::Approx(70.0));   // (8-1)/2 slots
  CHECK(p.mean_backoff_symbols(1) == doctest::Approx(150.0));
  CHECK(p.mean_backoff_symbols(2) == doctest::Approx(310.0));
  CHECK(p.mean_backoff_symbols(4) == doctest::Approx(310.0));
}

TEST_CASE("validation lists every violation at once") {
  ProtocolParams p;
  p.slot_symbols = 0;
  p.max_csma_backoffs = -1;
  p.mac_min_be = 6;  // exceeds max_be
  const auto errs = p.validate();
  CHECK(errs.size() >= 3);
  CHECK_THROWS_AS(require_valid(p), std::invalid_argument);
}

TEST_CASE("symbol-time unit conversions") {
  CHECK(units::kSymbolsPerSecond == 62500.0);
  CHECK(units::symbols_to_ms(62500.0) == doctest::Approx(1000.0));
  CHECK(units::ms_to_symbols(16.0) == doctest::Approx(1000.0));
  CHECK(units::pps_to_per_symbol(62500.0) == doctest::Approx(1.0));
  // 1 symbol = 16 microseconds
  CHECK(units::symbols_to_ms(1.0) == doctest::Approx(0.016));
}
