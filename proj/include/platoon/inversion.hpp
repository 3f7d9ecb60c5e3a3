#pragma once

#include "platoon/fuel_model.hpp"
#include "platoon/types.hpp"

namespace platoon {

// Fuel-ratio to drag-ratio conversion through the fuel model. `n` scales the
// fuel map on both sides (fuel = n * fuel_rate(P)); every ratio result is
// independent of it.

/// F = F∞ (1 - delta) with F∞ = n * fuel_rate at cd_infinity. delta >= 1 is a
/// domain error.
double fuel_from_ratio(double delta, const VehicleSpec& spec, const DrivingState& state, const Environment& env,
                       double n = 1.0);

/// Non-negative power whose fuel rate times n equals `fuel`. Throws
/// NoPositiveRoot when fuel is below the idle rate n * alpha0.
double power_from_fuel(const VehicleSpec& spec, double fuel, double n = 1.0);

/// Drag coefficient implied by a tractive power. Only the non-aerodynamic
/// resistance (and the inertia term) is subtracted, so feeding back the
/// power at cd returns cd.
double cd_from_power(const VehicleSpec& spec, double power_kw, const DrivingState& state, const Environment& env);

/// Pointwise conversion of a fuel-ratio series at its recorded speed
/// (steady state). Errors carry the point index.
MeasurementSeries series_fuel_to_drag(const MeasurementSeries& series, const VehicleSpec& spec,
                                      const Environment& env = {}, double n = 1.0);

}  // namespace platoon
