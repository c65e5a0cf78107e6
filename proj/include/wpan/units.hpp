#pragma once

// All internal time arithmetic is done in IEEE 802.15.4 symbol periods
// (16 us at 250 kb/s in the 2.4 GHz band).  Rates entering the toolkit in
// packets/second and delays leaving it in milliseconds are converted at the
// boundaries only.

namespace wpan::units {

inline constexpr double kSymbolsPerSecond = 62500.0;   // 1 / 16us
inline constexpr double kSecondsPerSymbol = 1.0 / kSymbolsPerSecond;
inline constexpr double kSymbolsPerMs = kSymbolsPerSecond / 1000.0;  // 62.5

inline constexpr double pps_to_per_symbol(double pps) { return pps / kSymbolsPerSecond; }
inline constexpr double per_symbol_to_pps(double ps) { return ps * kSymbolsPerSecond; }
inline constexpr double symbols_to_seconds(double sym) { return sym * kSecondsPerSymbol; }
inline constexpr double symbols_to_ms(double sym) { return sym / kSymbolsPerMs; }
inline constexpr double ms_to_symbols(double ms) { return ms * kSymbolsPerMs; }
inline constexpr double seconds_to_symbols(double s) { return s * kSymbolsPerSecond; }

}  // namespace wpan::units
