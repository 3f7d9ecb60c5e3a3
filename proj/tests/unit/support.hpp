#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "platoon/records.hpp"
#include "platoon/types.hpp"

#ifndef PLATOON_FIXTURE_DIR
#error "PLATOON_FIXTURE_DIR must point at the data directory"
#endif

namespace test {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(PLATOON_FIXTURE_DIR) / name; }

inline platoon::VehicleSpec vehicle(const std::string& name) { return platoon::load_vehicle(fixture("vehicles.kv"), name); }
inline platoon::DragModel model(const std::string& id) { return platoon::load_model(fixture("table2.kv"), id); }

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

inline platoon::DragModel make_model(double a, double b, double c, std::optional<double> g_o,
                                     platoon::Position pos = platoon::Position::Trail, int size = 2) {
  platoon::DragModel m;
  m.a = a;
  m.b = b;
  m.c = c;
  m.g_o_m = g_o;
  m.position = pos;
  m.platoon_size = size;
  return m;
}

// Scratch directory unique to the test binary run.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "platoon_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace test
