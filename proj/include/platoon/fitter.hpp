#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "platoon/types.hpp"

namespace platoon {

struct FitTolerance {
  double gradient = 1e-10;
  double step = 1e-10;
  double cost = 1e-10;
};

struct GoBounds {
  double lower_m = 0.0;
  double upper_m = 0.0;
};

struct FitInitialGuess {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  std::optional<double> g_o_m;
};

struct FitProblem {
  MeasurementSeries data;  // must be a drag-ratio series
  bool include_g_o = true;
  std::optional<GoBounds> g_o_bounds;
  std::optional<FitInitialGuess> initial_guess;
  int max_iterations = 200;
  FitTolerance tolerance;
  // Labels copied onto the fitted model.
  std::string id;
  Position position = Position::Trail;
  int platoon_size = 2;
};

enum class BoundSide { Lower, Upper };

struct FitResult {
  DragModel model;
  double residual_sum_squares = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<BoundSide> active_bounds;
  bool include_g_o = false;
  // Objective after each accepted step of the selected start, first entry is
  // the starting cost.
  std::vector<double> cost_trace;
  // G_o after each accepted step (4-parameter fits only).
  std::vector<double> g_o_trace;
  int starts = 0;
  std::vector<std::string> warnings;
};

/// Sum of squared residuals of `model` on `data`. With `piecewise`, points at
/// or beyond the model's G_o are compared against 1.
double fit_objective(const DragModel& model, const MeasurementSeries& data, bool piecewise);

/// Levenberg-Marquardt fit without bounds. With include_g_o the breakpoint is
/// a free parameter and c is tied to it by a * G_o^b + c = 1.
FitResult fit_unconstrained(const FitProblem& problem);

/// Fit with G_o held inside problem.g_o_bounds (projected LM, active set on G_o).
FitResult fit_bounded(const FitProblem& problem);

/// Dispatches on whether bounds are present.
FitResult fit(const FitProblem& problem);

/// Root of the fitted 3-parameter curve at ratio 1.
double extrapolated_breakpoint(const FitResult& result_without_g_o);

namespace detail {

// Residuals of a * G^b + c - r and their partials w.r.t. (a, b, c), row-major
// n x 3 in `jac`.
void power_residuals(double a, double b, double c, std::span<const MeasurementPoint> data,
                     std::span<double> residuals, std::span<double> jac);

// Residuals with c = 1 - a * G_o^b; points with G >= G_o give 1 - r. Partials
// w.r.t. (a, b, G_o), row-major n x 3.
void tied_residuals(double a, double b, double g_o, std::span<const MeasurementPoint> data,
                    std::span<double> residuals, std::span<double> jac);

// Signed grid of exponents used by the seeding scan.
std::vector<double> exponent_grid();

}  // namespace detail

}  // namespace platoon
