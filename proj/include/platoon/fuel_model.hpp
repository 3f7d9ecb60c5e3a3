#pragma once

#include "platoon/types.hpp"

namespace platoon {

struct DrivingState {
  double speed_kmh = 0.0;
  double accel_ms2 = 0.0;
  double grade = 0.0;  // road grade as a fraction, not the distance gap
};

struct Environment {
  double air_density_kgm3 = 1.2256;  // sea level, 15 °C
  double gravity_ms2 = 9.8066;
};

// Rolling-resistance parameters of the VT-CPFM reference. Fixtures carry them
// explicitly on each vehicle record.
struct RollingDefaults {
  static constexpr double cr = 1.75;
  static constexpr double c1 = 0.0328;
  static constexpr double c2 = 4.575;
};

inline constexpr double kRotationalMassFactor = 1.04;

std::vector<Violation> validate_state(const DrivingState& state);
std::vector<Violation> validate_environment(const Environment& env);

// Speed is km/h throughout; the 25.92 and 3600 constants absorb the unit
// conversions.

/// Rolling plus grade resistance in N (everything except aerodynamic drag).
double non_aero_resistance(const VehicleSpec& spec, const DrivingState& state, const Environment& env);
/// Aerodynamic drag in N for a drag coefficient cd.
double aero_resistance(const VehicleSpec& spec, double cd, const DrivingState& state, const Environment& env);
/// Total resistance R in N.
double resistance(const VehicleSpec& spec, double cd, const DrivingState& state, const Environment& env);
/// Tractive power in kW.
double power_kw(const VehicleSpec& spec, double cd, const DrivingState& state, const Environment& env);
/// Fuel rate in L/s; idle rate alpha0 for negative power.
double fuel_rate(const VehicleSpec& spec, double power_kw) noexcept;

/// Fuel rate at steady speed with the given drag coefficient.
double steady_fuel_rate(const VehicleSpec& spec, double cd, double speed_kmh, const Environment& env);

}  // namespace platoon
