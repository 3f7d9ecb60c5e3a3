#pragma once

#include <string>
#include <vector>

#include "platoon/fuel_model.hpp"
#include "platoon/types.hpp"

namespace platoon {

enum class Abscissa { DistanceGap, TimeGap };

/// (F(cd(gap)) - F∞) / F∞ at steady speed; negative values are savings.
double fuel_reduction(const VehicleSpec& spec, const DragModel& model, double gap_m, double speed_kmh,
                      const Environment& env = {});

/// Per-position reductions, front to back, for the config's gap.
std::vector<double> position_reductions(const PlatoonConfig& config, const Environment& env = {});

/// Unweighted mean of the per-position reductions.
double platoon_average_reduction(const PlatoonConfig& config, const Environment& env = {});

double time_gap_transform(double gap_time_s, double speed_kmh);

struct HeadwayFlow {
  double headway_s = 0.0;
  double flow_veh_per_hr = 0.0;
};

/// Front-to-front headway and the saturation flow it implies.
HeadwayFlow headway_and_flow(const VehicleSpec& spec, double gap_time_s, double speed_kmh);

struct CurveSample {
  double x = 0.0;
  double gap_m = 0.0;
  std::vector<double> reductions;  // one per platoon position
  double average = 0.0;
};

struct SavingsCurve {
  Abscissa abscissa = Abscissa::DistanceGap;
  double speed_kmh = 0.0;
  std::string platoon;  // e.g. "3 x hdt_x"
  std::vector<std::string> columns;  // per-position column names
  std::vector<CurveSample> samples;
};

struct CurveRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
};

/// Samples fuel_reduction for every position on [start, stop] (inclusive when
/// stop lands on the grid). The config's gap is ignored; its speed is used.
SavingsCurve savings_curve(const PlatoonConfig& config, Abscissa abscissa, const CurveRange& range,
                           const Environment& env = {});

std::vector<std::string> position_column_names(int size);

}  // namespace platoon
