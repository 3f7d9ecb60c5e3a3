// One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.
// Detail lines start with two spaces.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "platoon/analysis.hpp"
#include "platoon/drag_model.hpp"
#include "platoon/fitter.hpp"
#include "platoon/fuel_model.hpp"
#include "platoon/inversion.hpp"
#include "platoon/measurement_csv.hpp"
#include "platoon/records.hpp"
#include "platoon/reproduce.hpp"

#ifndef PLATOON_FIXTURE_DIR
#error "PLATOON_FIXTURE_DIR must point at the data directory"
#endif

using namespace platoon;

namespace {

// Tolerances.
constexpr double kContinuity = 5e-3;
constexpr double kNoiselessAbc = 1e-3;
constexpr double kNoiselessGo = 0.01;
constexpr double kNoisyRel = 0.10;
constexpr double kNoisySigma = 0.005;
constexpr int kNoisyTrials = 50;
constexpr double kNoisyRate = 0.90;
constexpr double kFuelInverse = 1e-9;
constexpr double kDragRoundTrip = 1e-6;
constexpr double kHeadway = 1e-3;
constexpr double kFlow = 2.0;
constexpr double kJacobian = 1e-6;

const std::filesystem::path kDir = PLATOON_FIXTURE_DIR;

int failures = 0;

void verdict(int n, bool pass, const std::string& what) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", n, what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

const char* const kFixtureIds[] = {"ldv2_lead", "ldv2_trail", "ldv3_lead",   "ldv3_middle", "ldv3_trail",
                                   "bus2_lead", "bus2_trail", "bus3_lead",   "bus3_middle", "bus3_trail",
                                   "hdt2_lead", "hdt2_trail", "hdt3_lead",   "hdt3_middle", "hdt3_trail"};

MeasurementSeries fixture_drag(const std::string& id) {
  auto s = read_measurement_csv(kDir / "measurements" / (id + ".csv"));
  if (s.kind == SeriesKind::FuelRatio) s = series_fuel_to_drag(s, load_vehicle(kDir / "vehicles.kv", "hdt_mcauliffe"));
  return s;
}

void continuity() {
  double worst = 0.0;
  int rows = 0;
  for (const auto& m : load_models(kDir / "table2.kv")) {
    if (!m.g_o_m) continue;
    ++rows;
    const double off = std::abs(power_branch(m, *m.g_o_m) - 1.0);
    worst = std::max(worst, off);
    if (off > kContinuity) std::printf("  %s: |a*G_o^b + c - 1| = %.3g\n", m.id.c_str(), off);
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "breakpoint continuity on %d rows, worst %.2e (tol %.0e)", rows, worst, kContinuity);
  verdict(1, worst <= kContinuity, buf);
}

void recovery() {
  const auto models = load_models(kDir / "table2.kv");
  bool noiseless_ok = true, noisy_ok = true;
  for (const auto& listed : models) {
    const auto truth = continuity_projected(listed);
    const double g_o = *truth.g_o_m;
    const double lower = 0.05 * g_o;

    std::string clean;
    try {
      const auto r = recover(truth, synthetic_series(truth, 20, lower));
      const double abc = std::max({r.rel_a, r.rel_b, r.rel_c});
      const bool ok = abc <= kNoiselessAbc && r.rel_g_o <= kNoiselessGo;
      noiseless_ok &= ok;
      char buf[96];
      std::snprintf(buf, sizeof buf, "abc %.1e G_o %.1e %s", abc, r.rel_g_o, ok ? "ok" : "FAIL");
      clean = buf;
    } catch (const std::exception& e) {
      noiseless_ok = false;
      clean = std::string("rejected (") + e.what() + ")";
    }

    std::mt19937_64 rng(0x5eed0000u + static_cast<unsigned>(&listed - models.data()));
    int all = 0, go_only = 0, rejected = 0;
    for (int t = 0; t < kNoisyTrials; ++t) {
      try {
        const auto r = recover(truth, synthetic_series(truth, 20, lower, kNoisySigma, &rng));
        if (r.rel_g_o <= kNoisyRel) ++go_only;
        if (std::max({r.rel_a, r.rel_b, r.rel_c, r.rel_g_o}) <= kNoisyRel) ++all;
      } catch (const std::exception&) {
        ++rejected;
      }
    }
    const double rate = static_cast<double>(all) / kNoisyTrials;
    noisy_ok &= rate >= kNoisyRate;
    std::printf("  %-12s noiseless %s; noisy %2d/%d all-4 (G_o only %2d/%d, rejected %d)\n", listed.id.c_str(),
                clean.c_str(), all, kNoisyTrials, go_only, kNoisyTrials, rejected);
  }
  verdict(2, noiseless_ok && noisy_ok,
          std::string("synthetic recovery (noiseless ") + (noiseless_ok ? "ok" : "failed") + ", noisy " +
              (noisy_ok ? "ok" : "below 90%") + ")");
}

void round_trips() {
  const auto vehicles = load_vehicles(kDir / "vehicles.kv");
  double worst_p = 0.0, worst_cd = 0.0;
  for (const auto& s : vehicles) {
    for (int i = 0; i <= 4000; ++i) {
      const double p = 0.1 * i;
      const double back = power_from_fuel(s, fuel_rate(s, p));
      // Relative error with a 1 kW floor so P = 0 is measurable.
      worst_p = std::max(worst_p, std::abs(back - p) / std::max(p, 1.0));
    }
    for (double v : {60.0, 80.0, 100.0}) {
      const DrivingState st{v, 0.0, 0.0};
      const double f_inf = fuel_rate(s, power_kw(s, s.cd_infinity, st, {}));
      for (int k = 0; k <= 80; ++k) {
        const double cd = 0.2 + 0.01 * k;
        const double delta = (f_inf - fuel_rate(s, power_kw(s, cd, st, {}))) / f_inf;
        const double back = cd_from_power(s, power_from_fuel(s, fuel_from_ratio(delta, s, st, {})), st, {});
        worst_cd = std::max(worst_cd, rel(back, cd));
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "inversion round trips on %zu vehicles, power %.1e (tol %.0e), drag %.1e (tol %.0e)",
                vehicles.size(), worst_p, kFuelInverse, worst_cd, kDragRoundTrip);
  verdict(3, worst_p <= kFuelInverse && worst_cd <= kDragRoundTrip, buf);
}

void headways() {
  struct Row {
    const char* vehicle;
    double h, flow;
  };
  const Row rows[] = {{"ldv_lumina", 0.678, 5309}, {"bus_s80", 0.932, 3862}, {"hdt_vnl670", 1.317, 2733}};
  bool ok = true;
  for (const auto& r : rows) {
    const auto hf = headway_and_flow(load_vehicle(kDir / "vehicles.kv", r.vehicle), 0.5, 100.0);
    const bool pass = std::abs(hf.headway_s - r.h) <= kHeadway && std::abs(hf.flow_veh_per_hr - r.flow) <= kFlow;
    ok &= pass;
    std::printf("  %-11s headway %.4f s (want %.3f), flow %.1f (want %.0f)\n", r.vehicle, hf.headway_s, r.h,
                hf.flow_veh_per_hr, r.flow);
  }
  verdict(4, ok, "headways and saturation flow at 0.5 s, 100 km/h");
}

void savings() {
  struct Expect {
    double gap_s;
    double want[3], tol[3];
  };
  const Expect expects[] = {{0.5, {4.5, 15.5, 7.0}, {1.5, 2.0, 1.5}}, {2.0, {0.6, 9.0, 4.5}, {0.5, 1.5, 1.5}}};
  const auto scenarios = savings_scenarios();
  bool ok = true;
  for (const auto& e : expects) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      const double pct = -100.0 * platoon_average_reduction(scenario_config(scenarios[i], kDir, e.gap_s, 100.0));
      const bool pass = std::abs(pct - e.want[i]) <= e.tol[i];
      ok &= pass;
      std::printf("  %s %.1f s: %.3f%% (want %.1f +- %.1f)\n", scenarios[i].label.c_str(), e.gap_s, pct, e.want[i],
                  e.tol[i]);
    }
  }
  verdict(5, ok, "platoon-average savings at 0.5 s and 2 s, 100 km/h");
}

void diagnostics() {
  bool ordered = true;
  double ldv4 = 0.0, ldv3 = 0.0;
  for (const char* id : kFixtureIds) {
    const auto data = fixture_drag(id);
    FitProblem p;
    p.data = data;
    p.include_g_o = false;
    const double rss3 = fit(p).residual_sum_squares;
    p.include_g_o = true;
    const double rss4 = fit(p).residual_sum_squares;
    // Equal optima can differ by solver round-off.
    const bool pass = rss4 <= rss3 * (1.0 + 1e-9) + 1e-15;
    ordered &= pass;
    if (!pass) std::printf("  %s: RSS with G_o %.4e > without %.4e\n", id, rss4, rss3);
    if (std::string(id) == "ldv2_trail") ldv4 = rss4, ldv3 = rss3;
  }
  auto within_order = [](double got, double want) { return got >= want / 10.0 && got <= want * 10.0; };
  const bool order = within_order(ldv4, 0.6387e-8) && within_order(ldv3, 0.7734e-8);
  std::printf("  two-LDV trail RSS %.4e with G_o (ref 0.6387e-8), %.4e without (ref 0.7734e-8)\n", ldv4, ldv3);
  verdict(6, ordered && order, "RSS with G_o <= without on every fixture; two-LDV trail within an order of magnitude");
}

// Central difference of one residual with respect to parameter k.
template <class R>
double central(R&& residual, std::array<double, 3> x, int k) {
  const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
  x[k] += h;
  const double plus = residual(x);
  x[k] -= 2 * h;
  return (plus - residual(x)) / (2 * h);
}

void jacobian() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.05, 2.0), ub(0.05, 1.5), uc(0.0, 2.5), ugo(5.0, 400.0), u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double sign = t % 2 ? 1.0 : -1.0;
    const double a = sign * ua(rng), b = sign * ub(rng), c = uc(rng), go = ugo(rng);
    const MeasurementPoint pt{go * (0.03 + 0.87 * u(rng)), 0.5 + 0.5 * u(rng)};
    const std::vector<MeasurementPoint> d{pt};
    auto check = [&](auto fn, std::array<double, 3> x) {
      double r = 0.0;
      std::array<double, 3> jac{};
      fn(x[0], x[1], x[2], d, std::span<double>(&r, 1), std::span<double>(jac));
      auto residual = [&](const std::array<double, 3>& y) {
        double rr = 0.0;
        std::array<double, 3> jj{};
        fn(y[0], y[1], y[2], d, std::span<double>(&rr, 1), std::span<double>(jj));
        return rr;
      };
      for (int k = 0; k < 3; ++k) {
        const double num = central(residual, x, k);
        worst = std::max(worst, std::abs(jac[k] - num) / std::max({std::abs(jac[k]), std::abs(num), 1.0}));
      }
    };
    check(detail::power_residuals, {a, b, c});
    check(detail::tied_residuals, {a, b, go});
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "analytic vs central-difference partials at 100 points, worst %.1e (tol %.0e)", worst,
                kJacobian);
  verdict(7, worst <= kJacobian, buf);
}

bool non_decreasing(const DragModel& m, double& at) {
  const double top = effective_breakpoint(m);
  double prev = -INFINITY;
  for (int i = 1; i <= 1000; ++i) {
    const double g = top * i / 1000.0;
    const double r = drag_ratio(m, g);
    if (r < prev) {
      at = g;
      return false;
    }
    prev = r;
  }
  return true;
}

void monotonicity() {
  std::vector<DragModel> models = load_models(kDir / "table2.kv");
  const std::size_t fixtures = models.size();
  for (const char* id : kFixtureIds) {
    FitProblem p;
    p.data = fixture_drag(id);
    p.id = std::string("fit_") + id;
    models.push_back(fit(p).model);
  }
  bool ok = true;
  for (const auto& m : models) {
    double at = 0.0;
    if (!non_decreasing(m, at)) {
      ok = false;
      std::printf("  %s decreases near %.4g m\n", m.id.c_str(), at);
    }
  }
  const auto spec = load_vehicle(kDir / "vehicles.kv", "hdt_x");
  for (std::size_t i = 0; i < fixtures; ++i) {
    const double bp = effective_breakpoint(models[i]);
    for (double f : {1.0, 1.001, 1.5, 3.0, 10.0}) {
      const double r = fuel_reduction(spec, models[i], bp * f, 100.0);
      if (r != 0.0) {
        ok = false;
        std::printf("  %s saves %.3g at %.4g m, beyond its breakpoint\n", models[i].id.c_str(), r, bp * f);
      }
    }
  }
  for (const auto& s : savings_scenarios()) {
    auto cfg = scenario_config(s, kDir, 1.0, 100.0);
    double far = 0.0;
    for (const auto& [pos, m] : cfg.models) far = std::max(far, effective_breakpoint(m));
    cfg.gap = DistanceGap{far};
    for (double r : position_reductions(cfg))
      if (r != 0.0) ok = false;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu fixture and fitted models non-decreasing; zero savings beyond breakpoints",
                models.size());
  verdict(8, ok, buf);
}

}  // namespace

int main() {
  const std::pair<int, void (*)()> criteria[] = {{1, continuity},    {2, recovery}, {3, round_trips}, {4, headways},
                                                 {5, savings},       {6, diagnostics}, {7, jacobian}, {8, monotonicity}};
  for (const auto& [n, run] : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      verdict(n, false, std::string("error: ") + e.what());
    }
  }
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
