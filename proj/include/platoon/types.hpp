#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace platoon {

enum class VehicleClass { LDV, Bus, HDT };
enum class Position { Lead, Middle, Trail };
enum class SeriesKind { DragRatio, FuelRatio };

std::string_view to_string(VehicleClass c) noexcept;
std::string_view to_string(Position p) noexcept;
std::string_view to_string(SeriesKind k) noexcept;
std::optional<VehicleClass> parse_vehicle_class(std::string_view s) noexcept;
std::optional<Position> parse_position(std::string_view s) noexcept;

// Units are part of every field name. Speeds are km/h, gaps m, masses kg.
struct VehicleSpec {
  std::string name;
  VehicleClass vehicle_class = VehicleClass::LDV;
  double mass_kg = 0.0;
  double length_m = 0.0;
  double width_m = 0.0;
  double height_m = 0.0;
  double frontal_area_m2 = 0.0;
  double cd_infinity = 0.0;
  double driveline_efficiency = 1.0;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double rolling_cr = 0.0;
  double rolling_c1 = 0.0;
  double rolling_c2 = 0.0;
  double altitude_correction = 1.0;
  double payload_kg = 0.0;

  // Mass used by the fuel model.
  double total_mass_kg() const noexcept { return mass_kg + payload_kg; }

  bool operator==(const VehicleSpec&) const = default;
};

/// Gap-dependent drag ratio C_D / C_D∞ = a * gap^b + c below the breakpoint,
/// exactly 1 at and beyond it. An absent breakpoint means the root of the
/// power branch is used (see effective_breakpoint).
struct DragModel {
  std::string id;  // optional label, e.g. "ldv2_trail"
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  std::optional<double> g_o_m;
  Position position = Position::Lead;
  int platoon_size = 2;

  bool operator==(const DragModel&) const = default;
};

struct MeasurementPoint {
  double gap_m = 0.0;
  double value = 0.0;

  bool operator==(const MeasurementPoint&) const = default;
};

struct MeasurementSeries {
  SeriesKind kind = SeriesKind::DragRatio;
  std::vector<MeasurementPoint> points;
  std::string source;
  std::optional<double> speed_kmh;  // required for FuelRatio

  double max_gap() const noexcept { return points.empty() ? 0.0 : points.back().gap_m; }
};

struct Violation {
  std::string field;
  std::string rule;
};

std::vector<Violation> validate_spec(const VehicleSpec& spec);
// Continuity at a listed breakpoint is checked to this absolute tolerance.
inline constexpr double kContinuityTolerance = 5e-3;
std::vector<Violation> validate_model(const DragModel& model);
std::vector<Violation> validate_series(const MeasurementSeries& series);

struct DistanceGap {
  double meters;
};
struct TimeGap {
  double seconds;
};

struct PlatoonConfig {
  VehicleSpec vehicle;
  int size = 2;
  double speed_kmh = 100.0;
  std::variant<DistanceGap, TimeGap> gap = DistanceGap{10.0};
  std::map<Position, DragModel> models;

  double gap_m() const noexcept;
  // Model governing each platoon position, front to back. Vehicles from the
  // third onwards share the Trail model.
  std::vector<const DragModel*> position_models() const;
};

std::vector<Violation> validate_config(const PlatoonConfig& config);

std::string describe(const std::vector<Violation>& violations);

}  // namespace platoon
