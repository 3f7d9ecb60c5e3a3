#include "platoon/report.hpp"

#include <json.hpp>
#include <sstream>

#include "platoon/digest.hpp"
#include "platoon/records.hpp"

namespace platoon {

using nlohmann::ordered_json;

namespace {

ordered_json model_json(const DragModel& m) {
  ordered_json j;
  j["id"] = m.id;
  j["a"] = m.a;
  j["b"] = m.b;
  j["c"] = m.c;
  j["g_o_m"] = m.g_o_m ? ordered_json(*m.g_o_m) : ordered_json(nullptr);
  j["position"] = std::string(to_string(m.position));
  j["platoon_size"] = m.platoon_size;
  return j;
}

std::string abscissa_name(Abscissa a) { return a == Abscissa::TimeGap ? "time_s" : "gap_m"; }

}  // namespace

std::string fit_report_json(const FitResult& r, const MeasurementSeries& data) {
  ordered_json j;
  j["model"] = model_json(r.model);
  j["include_g_o"] = r.include_g_o;
  j["residual_sum_squares"] = r.residual_sum_squares;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  auto bounds = ordered_json::array();
  for (auto b : r.active_bounds) bounds.push_back(b == BoundSide::Lower ? "lower" : "upper");
  j["active_bounds"] = bounds;
  j["starts"] = r.starts;
  j["warnings"] = r.warnings;
  j["input"] = {{"points", data.points.size()}, {"source", data.source}, {"sha256", digest_of(data)}};
  return j.dump(2) + "\n";
}

std::string curve_csv(const SavingsCurve& c) {
  std::ostringstream os;
  os << abscissa_name(c.abscissa);
  for (const auto& name : c.columns) os << ',' << name;
  os << ",average\n";
  for (const auto& s : c.samples) {
    os << format_double(s.x);
    for (double v : s.reductions) os << ',' << format_double(v);
    os << ',' << format_double(s.average) << '\n';
  }
  return os.str();
}

std::string curve_json(const SavingsCurve& c, const VehicleSpec& spec, const std::vector<DragModel>& models) {
  ordered_json j;
  j["platoon"] = c.platoon;
  j["abscissa"] = abscissa_name(c.abscissa);
  j["speed_kmh"] = c.speed_kmh;
  j["vehicle"] = {{"name", spec.name}, {"sha256", digest_of(spec)}};
  auto ms = ordered_json::array();
  for (const auto& m : models) ms.push_back({{"id", m.id}, {"position", std::string(to_string(m.position))}, {"sha256", digest_of(m)}});
  j["models"] = ms;
  j["columns"] = c.columns;
  auto samples = ordered_json::array();
  for (const auto& s : c.samples)
    samples.push_back({{"x", s.x}, {"gap_m", s.gap_m}, {"reductions", s.reductions}, {"average", s.average}});
  j["samples"] = samples;
  return j.dump(2) + "\n";
}

std::string manifest_json(const RunManifest& m) {
  ordered_json j;
  j["command"] = m.command;
  j["inputs"] = m.input_digests;
  j["config"] = m.config;
  j["outputs"] = m.outputs;
  j["timestamp"] = m.timestamp;
  return j.dump(2) + "\n";
}

}  // namespace platoon
