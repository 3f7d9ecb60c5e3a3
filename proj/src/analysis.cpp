#include "platoon/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "platoon/drag_model.hpp"
#include "platoon/error.hpp"
#include "platoon/records.hpp"

namespace platoon {

double fuel_reduction(const VehicleSpec& spec, const DragModel& model, double gap_m, double speed_kmh,
                      const Environment& env) {
  const double ratio = drag_ratio(model, gap_m);
  const double f_inf = steady_fuel_rate(spec, spec.cd_infinity, speed_kmh, env);
  const double f = steady_fuel_rate(spec, spec.cd_infinity * ratio, speed_kmh, env);
  return (f - f_inf) / f_inf;
}

std::vector<double> position_reductions(const PlatoonConfig& config, const Environment& env) {
  if (auto v = validate_config(config); !v.empty()) fail(ErrorKind::InvalidProblem, describe(v));
  const double gap = config.gap_m();
  std::vector<double> out;
  for (const DragModel* m : config.position_models())
    out.push_back(fuel_reduction(config.vehicle, *m, gap, config.speed_kmh, env));
  return out;
}

double platoon_average_reduction(const PlatoonConfig& config, const Environment& env) {
  const auto r = position_reductions(config, env);
  return std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
}

double time_gap_transform(double gap_time_s, double speed_kmh) { return gap_time_s * speed_kmh / 3.6; }

HeadwayFlow headway_and_flow(const VehicleSpec& spec, double gap_time_s, double speed_kmh) {
  if (!(gap_time_s > 0.0 && speed_kmh > 0.0))
    fail(ErrorKind::Domain, "headway needs positive time gap and speed");
  const double v_ms = speed_kmh / 3.6;
  HeadwayFlow out;
  out.headway_s = (spec.length_m + gap_time_s * v_ms) / v_ms;
  out.flow_veh_per_hr = 3600.0 / out.headway_s;
  return out;
}

std::vector<std::string> position_column_names(int size) {
  std::vector<std::string> names;
  for (int i = 1; i <= size; ++i) {
    if (i == 1)
      names.emplace_back("lead");
    else if (i == size)
      names.emplace_back("trail");
    else
      names.push_back("middle_" + std::to_string(i));
  }
  return names;
}

SavingsCurve savings_curve(const PlatoonConfig& config, Abscissa abscissa, const CurveRange& range,
                           const Environment& env) {
  if (auto v = validate_config(config); !v.empty()) fail(ErrorKind::InvalidProblem, describe(v));
  if (!(range.start > 0.0 && range.stop >= range.start && range.step > 0.0))
    fail(ErrorKind::InvalidProblem, "curve range needs 0 < start <= stop and step > 0");
  const auto models = config.position_models();
  double max_break = 0.0;
  std::vector<double> breaks;
  for (const DragModel* m : models) {
    breaks.push_back(effective_breakpoint(*m));
    max_break = std::max(max_break, breaks.back());
  }
  const double stop_gap = abscissa == Abscissa::TimeGap ? time_gap_transform(range.stop, config.speed_kmh) : range.stop;
  if (stop_gap > 10.0 * max_break * (1.0 + 1e-12))
    fail(ErrorKind::InvalidProblem, "curve range extends beyond 10 x the largest breakpoint (" +
                                        format_double(10.0 * max_break) + " m)");

  SavingsCurve curve;
  curve.abscissa = abscissa;
  curve.speed_kmh = config.speed_kmh;
  curve.platoon = std::to_string(config.size) + " x " + config.vehicle.name;
  curve.columns = position_column_names(config.size);

  const double f_inf = steady_fuel_rate(config.vehicle, config.vehicle.cd_infinity, config.speed_kmh, env);
  // Index-based grid keeps the sample abscissae free of accumulated error.
  const auto count = static_cast<long>(std::floor((range.stop - range.start) / range.step + 1e-9)) + 1;
  curve.samples.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    CurveSample s;
    s.x = range.start + static_cast<double>(i) * range.step;
    s.gap_m = abscissa == Abscissa::TimeGap ? time_gap_transform(s.x, config.speed_kmh) : s.x;
    for (std::size_t k = 0; k < models.size(); ++k) {
      const double ratio = drag_ratio(*models[k], s.gap_m, breaks[k]);
      const double f = steady_fuel_rate(config.vehicle, config.vehicle.cd_infinity * ratio, config.speed_kmh, env);
      s.reductions.push_back((f - f_inf) / f_inf);
    }
    s.average = std::accumulate(s.reductions.begin(), s.reductions.end(), 0.0) / static_cast<double>(s.reductions.size());
    curve.samples.push_back(std::move(s));
  }
  return curve;
}

}  // namespace platoon
