#include "platoon/fuel_model.hpp"

#include <cmath>

#include "platoon/error.hpp"
#include "platoon/records.hpp"

namespace platoon {

std::vector<Violation> validate_state(const DrivingState& s) {
  std::vector<Violation> out;
  if (!(std::isfinite(s.speed_kmh) && s.speed_kmh >= 0.0)) out.push_back({"speed_kmh", "must be >= 0"});
  if (!std::isfinite(s.accel_ms2)) out.push_back({"accel_ms2", "must be finite"});
  if (!(std::abs(s.grade) < 0.2)) out.push_back({"grade", "|grade| must be < 0.2"});
  return out;
}

std::vector<Violation> validate_environment(const Environment& e) {
  std::vector<Violation> out;
  if (!(e.air_density_kgm3 > 0.8 && e.air_density_kgm3 < 1.5))
    out.push_back({"air_density_kgm3", "must lie in (0.8, 1.5)"});
  if (!(std::isfinite(e.gravity_ms2) && e.gravity_ms2 > 0.0)) out.push_back({"gravity_ms2", "must be > 0"});
  return out;
}

namespace {

void check_speed(const DrivingState& s) {
  if (!(s.speed_kmh >= 0.0) || !std::isfinite(s.speed_kmh))
    fail(ErrorKind::Domain, "speed must be >= 0 km/h, got " + format_double(s.speed_kmh));
}

}  // namespace

double non_aero_resistance(const VehicleSpec& spec, const DrivingState& s, const Environment& env) {
  check_speed(s);
  const double m = spec.total_mass_kg();
  const double rolling = env.gravity_ms2 * m * (spec.rolling_cr / 1000.0) * (spec.rolling_c1 * s.speed_kmh + spec.rolling_c2);
  return rolling + env.gravity_ms2 * m * s.grade;
}

double aero_resistance(const VehicleSpec& spec, double cd, const DrivingState& s, const Environment& env) {
  check_speed(s);
  return (env.air_density_kgm3 / 25.92) * cd * spec.altitude_correction * spec.frontal_area_m2 * s.speed_kmh *
         s.speed_kmh;
}

double resistance(const VehicleSpec& spec, double cd, const DrivingState& s, const Environment& env) {
  return aero_resistance(spec, cd, s, env) + non_aero_resistance(spec, s, env);
}

double power_kw(const VehicleSpec& spec, double cd, const DrivingState& s, const Environment& env) {
  const double r = resistance(spec, cd, s, env);
  return (r + kRotationalMassFactor * spec.total_mass_kg() * s.accel_ms2) / (3600.0 * spec.driveline_efficiency) *
         s.speed_kmh;
}

double fuel_rate(const VehicleSpec& spec, double p) noexcept {
  if (p < 0.0) return spec.alpha0;
  return spec.alpha0 + spec.alpha1 * p + spec.alpha2 * p * p;
}

double steady_fuel_rate(const VehicleSpec& spec, double cd, double speed_kmh, const Environment& env) {
  return fuel_rate(spec, power_kw(spec, cd, DrivingState{speed_kmh, 0.0, 0.0}, env));
}

}  // namespace platoon
