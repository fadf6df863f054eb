// Physical constants and dB/power conversion helpers shared across modules.

#pragma once

#include <cmath>
#include <limits>

namespace implantsim {

inline constexpr double kEps0 = 8.8541878128e-12;  // F/m
inline constexpr double kMu0 = 1.25663706212e-6;   // H/m
inline constexpr double kC0 = 299792458.0;         // m/s
inline constexpr double kEta0 = 376.730313668;     // ohm, free-space impedance

// 20/ln(10): converts field attenuation Np -> dB.
inline constexpr double kNpToDb = 8.685889638065037;

inline double dbm_to_watt(double dbm) {
    if (std::isinf(dbm) && dbm < 0) return 0.0;
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

inline double watt_to_dbm(double w) {
    if (w <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(w) + 30.0;
}

inline double db_to_power_ratio(double db) { return std::pow(10.0, db / 10.0); }
inline double power_ratio_to_db(double ratio) { return 10.0 * std::log10(ratio); }
inline double amplitude_to_db(double amp) { return 20.0 * std::log10(amp); }

}  // namespace implantsim
