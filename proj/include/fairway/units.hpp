#pragma once

// Internal computations run in SI units (m, s, m/s). km/h, vessels/km and
// vessels/h appear only at I/O boundaries and in the macroscopic models,
// which are calibrated in those units.

namespace fairway::units {

inline constexpr double kKmhPerMps = 3.6;
inline constexpr double kMetersPerKm = 1000.0;

constexpr double mps_to_kmh(double mps) { return mps * kKmhPerMps; }
constexpr double kmh_to_mps(double kmh) { return kmh / kKmhPerMps; }
constexpr double meters_to_km(double m) { return m / kMetersPerKm; }

}  // namespace fairway::units
