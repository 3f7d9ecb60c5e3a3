#pragma once

// Checks of computed values against reference values, run over the fixture
// directory (vehicles.kv, table2.kv).

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "platoon/analysis.hpp"
#include "platoon/fitter.hpp"
#include "platoon/types.hpp"

namespace platoon {

enum class ReproTarget { Table2, Headways, SavingsSummary };

std::optional<ReproTarget> parse_repro_target(std::string_view s) noexcept;
std::string_view to_string(ReproTarget t) noexcept;

struct ReproLine {
  std::string item;
  double computed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;  // absolute
  bool pass = false;
  std::string note;
};

struct ReproReport {
  ReproTarget target = ReproTarget::Table2;
  std::vector<ReproLine> lines;

  int failures() const noexcept;
};

ReproReport reproduce(ReproTarget target, const std::filesystem::path& fixture_dir);

/// One line per item: PASS/FAIL, item, computed, expected, tolerance.
std::string format_report(const ReproReport& report);

// Helpers shared with the tests.

/// Same model with c replaced so that a * G_o^b + c = 1 exactly. A lead row
/// without G_o gets its root as G_o.
DragModel continuity_projected(const DragModel& model);

/// `count` gaps evenly spaced on (lower, 0.9 G_o], ratios from the model's
/// power branch, plus N(0, sigma) noise when `rng` is given.
MeasurementSeries synthetic_series(const DragModel& truth, int count, double lower_m, double sigma = 0.0,
                                   std::mt19937_64* rng = nullptr);

/// 0.05 G_o, raised when needed so the power branch stays at or above 0.05
/// (steep lead rows go negative close to the vehicle).
double valid_window_start(const DragModel& truth);

struct Recovery {
  FitResult fit;
  double rel_a = 0.0;
  double rel_b = 0.0;
  double rel_c = 0.0;
  double rel_g_o = 0.0;
};

/// Fits `data` with G_o included and compares against `truth`.
Recovery recover(const DragModel& truth, const MeasurementSeries& data);

struct SavingsScenario {
  std::string label;         // "LDV", "Bus", "HDT"
  std::string vehicle;       // vehicles.kv name
  std::optional<double> payload_kg;  // overrides the fixture payload
  std::string lead, middle, trail;   // table2.kv ids
};

/// The three-vehicle platoons behind the savings summary.
std::vector<SavingsScenario> savings_scenarios();
PlatoonConfig scenario_config(const SavingsScenario& s, const std::filesystem::path& fixture_dir, double gap_time_s,
                              double speed_kmh);

}  // namespace platoon
