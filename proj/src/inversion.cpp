#include "platoon/inversion.hpp"

#include <cmath>

#include "platoon/error.hpp"
#include "platoon/records.hpp"

namespace platoon {

double fuel_from_ratio(double delta, const VehicleSpec& spec, const DrivingState& state, const Environment& env,
                       double n) {
  if (!(delta < 1.0) || !std::isfinite(delta))
    fail(ErrorKind::Domain, "fuel ratio must be < 1 (fuel cannot be negative), got " + format_double(delta));
  if (!(n > 0.0)) fail(ErrorKind::Domain, "fuel scale n must be > 0");
  const double f_inf = n * fuel_rate(spec, power_kw(spec, spec.cd_infinity, state, env));
  return f_inf * (1.0 - delta);
}

double power_from_fuel(const VehicleSpec& spec, double fuel, double n) {
  if (!(n > 0.0)) fail(ErrorKind::Domain, "fuel scale n must be > 0");
  const double excess = fuel - n * spec.alpha0;
  if (!(excess >= 0.0))
    fail(ErrorKind::NoPositiveRoot, "fuel " + format_double(fuel) + " is below the idle rate " +
                                        format_double(n * spec.alpha0));
  if (spec.alpha2 == 0.0) {
    if (!(spec.alpha1 > 0.0)) fail(ErrorKind::NoPositiveRoot, "fuel map is constant (alpha1 = alpha2 = 0)");
    return excess / (n * spec.alpha1);
  }
  const double disc = n * n * spec.alpha1 * spec.alpha1 + 4.0 * n * spec.alpha2 * excess;
  if (!(disc >= 0.0)) fail(ErrorKind::NoPositiveRoot, "negative discriminant in fuel-to-power inversion");
  // (-n a1 + sqrt(disc)) / (2 n a2), rationalized to avoid cancellation for small a2.
  const double denom = n * spec.alpha1 + std::sqrt(disc);
  if (denom == 0.0) return 0.0;
  return 2.0 * excess / denom;
}

double cd_from_power(const VehicleSpec& spec, double p, const DrivingState& state, const Environment& env) {
  if (!(state.speed_kmh > 0.0))
    fail(ErrorKind::Domain, "drag coefficient inversion needs speed > 0 km/h");
  const double v = state.speed_kmh;
  const double tractive = p * 3600.0 * spec.driveline_efficiency / v;
  const double inertia = kRotationalMassFactor * spec.total_mass_kg() * state.accel_ms2;
  const double aero_per_cd =
      (env.air_density_kgm3 / 25.92) * spec.frontal_area_m2 * spec.altitude_correction * v * v;
  return (tractive - inertia - non_aero_resistance(spec, state, env)) / aero_per_cd;
}

MeasurementSeries series_fuel_to_drag(const MeasurementSeries& series, const VehicleSpec& spec,
                                      const Environment& env, double n) {
  if (series.kind != SeriesKind::FuelRatio) fail(ErrorKind::InvalidProblem, "series is not a fuel-ratio series");
  if (!(series.speed_kmh && *series.speed_kmh > 0.0))
    fail(ErrorKind::InvalidProblem, "fuel-ratio series has no recorded speed");
  const DrivingState state{*series.speed_kmh, 0.0, 0.0};
  MeasurementSeries out;
  out.kind = SeriesKind::DragRatio;
  out.source = series.source + " (via fuel model, vehicle " + spec.name + ")";
  out.points.reserve(series.points.size());
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const auto& pt = series.points[i];
    try {
      const double fuel = fuel_from_ratio(pt.value, spec, state, env, n);
      const double p = power_from_fuel(spec, fuel, n);
      const double cd = cd_from_power(spec, p, state, env);
      out.points.push_back({pt.gap_m, cd / spec.cd_infinity});
    } catch (const Error& e) {
      throw Error(e.kind(), "point " + std::to_string(i) + " (gap " + format_double(pt.gap_m) + " m): " + e.what());
    }
  }
  return out;
}

}  // namespace platoon
