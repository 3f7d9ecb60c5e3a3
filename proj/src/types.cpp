#include "platoon/types.hpp"

#include <cmath>
#include <sstream>

#include "platoon/error.hpp"

namespace platoon {

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::InvalidProblem: return "invalid_problem";
    case ErrorKind::NonConvergence: return "non_convergence";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::NoBreakpoint: return "no_breakpoint";
    case ErrorKind::NoPositiveRoot: return "no_positive_root";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

std::string_view to_string(VehicleClass c) noexcept {
  switch (c) {
    case VehicleClass::LDV: return "LDV";
    case VehicleClass::Bus: return "Bus";
    case VehicleClass::HDT: return "HDT";
  }
  return "?";
}

std::string_view to_string(Position p) noexcept {
  switch (p) {
    case Position::Lead: return "Lead";
    case Position::Middle: return "Middle";
    case Position::Trail: return "Trail";
  }
  return "?";
}

std::string_view to_string(SeriesKind k) noexcept {
  return k == SeriesKind::DragRatio ? "DragRatio" : "FuelRatio";
}

std::optional<VehicleClass> parse_vehicle_class(std::string_view s) noexcept {
  if (s == "LDV") return VehicleClass::LDV;
  if (s == "Bus") return VehicleClass::Bus;
  if (s == "HDT") return VehicleClass::HDT;
  return std::nullopt;
}

std::optional<Position> parse_position(std::string_view s) noexcept {
  if (s == "Lead") return Position::Lead;
  if (s == "Middle") return Position::Middle;
  if (s == "Trail") return Position::Trail;
  return std::nullopt;
}

namespace {

class Checker {
 public:
  void positive(const char* field, double v) {
    if (!(std::isfinite(v) && v > 0.0)) add(field, "must be finite and > 0");
  }
  void non_negative(const char* field, double v) {
    if (!(std::isfinite(v) && v >= 0.0)) add(field, "must be finite and >= 0");
  }
  void finite(const char* field, double v) {
    if (!std::isfinite(v)) add(field, "must be finite");
  }
  void add(std::string field, std::string rule) { out.push_back({std::move(field), std::move(rule)}); }

  std::vector<Violation> out;
};

}  // namespace

std::vector<Violation> validate_spec(const VehicleSpec& s) {
  Checker k;
  if (s.name.empty()) k.add("name", "must not be empty");
  k.positive("mass_kg", s.mass_kg);
  k.positive("length_m", s.length_m);
  k.positive("width_m", s.width_m);
  k.positive("height_m", s.height_m);
  k.positive("frontal_area_m2", s.frontal_area_m2);
  k.positive("cd_infinity", s.cd_infinity);
  if (!(std::isfinite(s.driveline_efficiency) && s.driveline_efficiency > 0.0 &&
        s.driveline_efficiency <= 1.0))
    k.add("driveline_efficiency", "must lie in (0, 1]");
  k.non_negative("alpha0", s.alpha0);
  k.non_negative("alpha1", s.alpha1);
  k.non_negative("alpha2", s.alpha2);
  if (s.alpha2 == 0.0 && !(s.alpha1 > 0.0))
    k.add("alpha1", "alpha2 = 0 requires alpha1 > 0 (fuel map must be invertible)");
  k.non_negative("rolling_cr", s.rolling_cr);
  k.non_negative("rolling_c1", s.rolling_c1);
  k.non_negative("rolling_c2", s.rolling_c2);
  k.positive("altitude_correction", s.altitude_correction);
  k.non_negative("payload_kg", s.payload_kg);
  if (s.frontal_area_m2 > s.width_m * s.height_m)
    k.add("frontal_area_m2", "must not exceed width_m * height_m");
  return std::move(k.out);
}

std::vector<Violation> validate_model(const DragModel& m) {
  Checker k;
  k.finite("a", m.a);
  k.finite("b", m.b);
  k.finite("c", m.c);
  if (!(m.a * m.b > 0.0)) k.add("a", "a * b must be > 0 (ratio non-decreasing in gap)");
  if (m.platoon_size < 2) k.add("platoon_size", "must be >= 2");
  if (m.position == Position::Middle && m.platoon_size < 3)
    k.add("position", "Middle requires platoon_size >= 3");
  if (m.g_o_m) {
    const double g = *m.g_o_m;
    if (!(std::isfinite(g) && g > 0.0)) {
      k.add("g_o_m", "must be finite and > 0 when present");
    } else {
      const double gap = std::abs(m.a * std::pow(g, m.b) + m.c - 1.0);
      if (!(gap <= kContinuityTolerance)) k.add("g_o_m", "a * g_o^b + c must equal 1 within 5e-3");
    }
  }
  return std::move(k.out);
}

std::vector<Violation> validate_series(const MeasurementSeries& s) {
  Checker k;
  if (s.points.size() < 4) k.add("points", "at least 4 points are required");
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto& p = s.points[i];
    const std::string where = "points[" + std::to_string(i) + "]";
    if (!(std::isfinite(p.gap_m) && p.gap_m > 0.0)) k.add(where, "gap_m must be > 0");
    if (i > 0 && !(p.gap_m > s.points[i - 1].gap_m)) k.add(where, "gaps must be strictly increasing");
    if (s.kind == SeriesKind::DragRatio && !(p.value > 0.0 && p.value < 2.0))
      k.add(where, "drag ratio must lie in (0, 2)");
    if (s.kind == SeriesKind::FuelRatio && !(p.value > -1.0 && p.value < 1.0))
      k.add(where, "fuel ratio must lie in (-1, 1)");
  }
  if (s.kind == SeriesKind::FuelRatio && !(s.speed_kmh && *s.speed_kmh > 0.0))
    k.add("speed_kmh", "required and > 0 for fuel-ratio series");
  return std::move(k.out);
}

double PlatoonConfig::gap_m() const noexcept {
  if (const auto* d = std::get_if<DistanceGap>(&gap)) return d->meters;
  return std::get<TimeGap>(gap).seconds * speed_kmh / 3.6;
}

std::vector<const DragModel*> PlatoonConfig::position_models() const {
  std::vector<const DragModel*> out;
  auto find = [&](Position p) -> const DragModel* {
    auto it = models.find(p);
    if (it == models.end())
      fail(ErrorKind::InvalidProblem, "platoon config lacks a " + std::string(to_string(p)) + " model");
    return &it->second;
  };
  if (size < 2) fail(ErrorKind::InvalidProblem, "platoon size must be >= 2");
  out.push_back(find(Position::Lead));
  if (size >= 3) out.push_back(find(Position::Middle));
  const DragModel* trail = find(Position::Trail);
  while (static_cast<int>(out.size()) < size) out.push_back(trail);
  return out;
}

std::vector<Violation> validate_config(const PlatoonConfig& c) {
  std::vector<Violation> out = validate_spec(c.vehicle);
  if (c.size < 2) out.push_back({"size", "must be >= 2"});
  if (!(c.speed_kmh > 0.0)) out.push_back({"speed_kmh", "must be > 0"});
  if (!(c.gap_m() > 0.0)) out.push_back({"gap", "must be > 0"});
  auto need = [&](Position p) {
    if (!c.models.count(p)) out.push_back({"models", "missing " + std::string(to_string(p)) + " model"});
  };
  need(Position::Lead);
  need(Position::Trail);
  if (c.size >= 3) need(Position::Middle);
  for (const auto& [pos, m] : c.models)
    for (auto& v : validate_model(m)) out.push_back({"models." + std::string(to_string(pos)) + "." + v.field, v.rule});
  return out;
}

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].field << ": " << violations[i].rule;
  }
  return os.str();
}

}  // namespace platoon
