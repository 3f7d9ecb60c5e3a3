#pragma once

#include "platoon/types.hpp"

namespace platoon {

// Bracket and tolerance for locating the root of a * G^b + c = 1.
inline constexpr double kBreakpointSearchLow = 1e-3;
inline constexpr double kBreakpointSearchHigh = 1e3;
inline constexpr double kBreakpointTolerance = 1e-6;

/// Unclamped power branch a * gap^b + c.
double power_branch(const DragModel& model, double gap_m) noexcept;

/// Gap beyond which the ratio is 1: the listed G_o, or the bisection root of
/// the power branch when G_o is absent. Throws NoBreakpoint if the branch
/// does not cross 1 inside [1e-3, 1e3] m.
double effective_breakpoint(const DragModel& model);

/// C_D / C_D∞ at a distance gap. Exactly 1.0 at and beyond the breakpoint;
/// below it the branch is capped at 1.
double drag_ratio(const DragModel& model, double gap_m);
double drag_ratio(const DragModel& model, double gap_m, double breakpoint_m);

double drag_coefficient(const VehicleSpec& spec, const DragModel& model, double gap_m);

}  // namespace platoon
