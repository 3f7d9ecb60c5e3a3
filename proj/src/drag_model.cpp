#include "platoon/drag_model.hpp"

#include <algorithm>
#include <cmath>

#include "platoon/error.hpp"
#include "platoon/records.hpp"

namespace platoon {

double power_branch(const DragModel& m, double gap_m) noexcept { return m.a * std::pow(gap_m, m.b) + m.c; }

double effective_breakpoint(const DragModel& m) {
  if (m.g_o_m) return *m.g_o_m;
  auto f = [&](double g) { return power_branch(m, g) - 1.0; };
  double lo = kBreakpointSearchLow;
  double hi = kBreakpointSearchHigh;
  double flo = f(lo);
  const double fhi = f(hi);
  if (std::isfinite(flo) && flo == 0.0) return lo;
  if (std::isfinite(fhi) && fhi == 0.0) return hi;
  if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo < 0.0) == (fhi < 0.0))
    fail(ErrorKind::NoBreakpoint, "drag model '" + m.id + "' (a=" + format_double(m.a) + ", b=" +
                                      format_double(m.b) + ", c=" + format_double(m.c) +
                                      ") never reaches a ratio of 1 within [1e-3, 1e3] m");
  while (hi - lo > kBreakpointTolerance) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double drag_ratio(const DragModel& m, double gap_m, double breakpoint_m) {
  if (!(gap_m > 0.0) || !std::isfinite(gap_m))
    fail(ErrorKind::Domain, "distance gap must be > 0, got " + format_double(gap_m));
  if (gap_m >= breakpoint_m) return 1.0;
  return std::min(power_branch(m, gap_m), 1.0);
}

double drag_ratio(const DragModel& m, double gap_m) {
  if (!(gap_m > 0.0) || !std::isfinite(gap_m))
    fail(ErrorKind::Domain, "distance gap must be > 0, got " + format_double(gap_m));
  return drag_ratio(m, gap_m, effective_breakpoint(m));
}

double drag_coefficient(const VehicleSpec& spec, const DragModel& m, double gap_m) {
  return spec.cd_infinity * drag_ratio(m, gap_m);
}

}  // namespace platoon
