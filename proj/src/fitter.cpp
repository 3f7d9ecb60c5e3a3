#include "platoon/fitter.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "platoon/drag_model.hpp"
#include "platoon/error.hpp"
#include "platoon/records.hpp"

namespace platoon {

namespace detail {

void power_residuals(double a, double b, double c, std::span<const MeasurementPoint> data,
                     std::span<double> residuals, std::span<double> jac) {
  for (std::size_t j = 0; j < data.size(); ++j) {
    const double g = data[j].gap_m;
    const double gb = std::pow(g, b);
    residuals[j] = a * gb + c - data[j].value;
    if (!jac.empty()) {
      jac[3 * j + 0] = gb;
      jac[3 * j + 1] = a * gb * std::log(g);
      jac[3 * j + 2] = 1.0;
    }
  }
}

void tied_residuals(double a, double b, double g_o, std::span<const MeasurementPoint> data,
                    std::span<double> residuals, std::span<double> jac) {
  const double gob = std::pow(g_o, b);
  const double log_go = std::log(g_o);
  for (std::size_t j = 0; j < data.size(); ++j) {
    const double g = data[j].gap_m;
    if (g >= g_o) {
      residuals[j] = 1.0 - data[j].value;
      if (!jac.empty()) jac[3 * j + 0] = jac[3 * j + 1] = jac[3 * j + 2] = 0.0;
      continue;
    }
    const double gb = std::pow(g, b);
    residuals[j] = a * (gb - gob) + 1.0 - data[j].value;
    if (!jac.empty()) {
      jac[3 * j + 0] = gb - gob;
      jac[3 * j + 1] = a * (gb * std::log(g) - gob * log_go);
      jac[3 * j + 2] = -a * b * gob / g_o;
    }
  }
}

std::vector<double> exponent_grid() {
  // |b| log-spaced on [0.005, 3], both signs.
  constexpr int kPerSign = 60;
  std::vector<double> out;
  out.reserve(2 * kPerSign);
  const double lo = std::log(0.005);
  const double hi = std::log(3.0);
  for (int i = 0; i < kPerSign; ++i) {
    const double mag = std::exp(lo + (hi - lo) * i / (kPerSign - 1));
    out.push_back(-mag);
    out.push_back(mag);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Residual callback: fills r (n) and J (n x p); returns false when x is
// outside the model's domain or produces non-finite values.
using ResidualFn = std::function<bool(const VectorXd& x, VectorXd& r, MatrixXd& J)>;

struct LmOptions {
  int max_iterations = 200;
  FitTolerance tol;
  VectorXd lower;  // per-parameter bounds, +-inf when free
  VectorXd upper;
};

struct LmOutcome {
  VectorXd x;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
  std::vector<VectorXd> iterates;
};

bool all_finite(const VectorXd& v) { return v.allFinite(); }

VectorXd project(const VectorXd& x, const LmOptions& o) { return x.cwiseMax(o.lower).cwiseMin(o.upper); }

// Levenberg-Marquardt with Marquardt diagonal scaling and box projection.
// Damping starts at 1e-3, x10 on a rejected step, /10 on an accepted one.
LmOutcome levenberg_marquardt(const ResidualFn& f, VectorXd x0, std::size_t n_residuals, const LmOptions& o) {
  const Eigen::Index p = x0.size();
  LmOutcome out;
  out.x = project(x0, o);
  VectorXd r(n_residuals);
  MatrixXd J(n_residuals, p);
  if (!f(out.x, r, J) || !all_finite(r) || !J.allFinite())
    fail(ErrorKind::NonConvergence, "residuals are not finite at the starting point");
  out.cost = r.squaredNorm();
  out.trace.push_back(out.cost);
  out.iterates.push_back(out.x);

  double lambda = 1e-3;
  VectorXd r_new(n_residuals);
  MatrixXd J_new(n_residuals, p);

  while (out.iterations < o.max_iterations) {
    if (out.cost == 0.0) {
      out.converged = true;
      break;
    }
    const VectorXd g = J.transpose() * r;
    const MatrixXd A = J.transpose() * J;

    // Active set: bound-held parameters whose gradient points outward.
    std::vector<Eigen::Index> free_idx;
    for (Eigen::Index i = 0; i < p; ++i) {
      const bool at_lower = out.x[i] <= o.lower[i] && g[i] > 0.0;
      const bool at_upper = out.x[i] >= o.upper[i] && g[i] < 0.0;
      if (!at_lower && !at_upper) free_idx.push_back(i);
    }
    double gmax = 0.0;
    for (auto i : free_idx) gmax = std::max(gmax, std::abs(g[i]));
    if (free_idx.empty() || gmax <= o.tol.gradient) {
      out.converged = true;
      break;
    }

    const auto nf = static_cast<Eigen::Index>(free_idx.size());
    MatrixXd Af(nf, nf);
    VectorXd gf(nf);
    double dmax = 0.0;
    for (Eigen::Index i = 0; i < nf; ++i) {
      gf[i] = g[free_idx[i]];
      for (Eigen::Index k = 0; k < nf; ++k) Af(i, k) = A(free_idx[i], free_idx[k]);
      dmax = std::max(dmax, Af(i, i));
    }
    const double dfloor = std::max(dmax * 1e-12, 1e-300);

    ++out.iterations;
    MatrixXd M = Af;
    for (Eigen::Index i = 0; i < nf; ++i) M(i, i) += lambda * std::max(Af(i, i), dfloor);
    Eigen::LDLT<MatrixXd> ldlt(M);
    VectorXd step_f;
    if (ldlt.info() == Eigen::Success) step_f = ldlt.solve(-gf);
    if (ldlt.info() != Eigen::Success || !step_f.allFinite()) {
      lambda *= 10.0;
      if (lambda > 1e20) fail(ErrorKind::NonConvergence, "normal equations stayed singular under damping");
      continue;
    }
    VectorXd x_new = out.x;
    for (Eigen::Index i = 0; i < nf; ++i) x_new[free_idx[i]] += step_f[i];
    x_new = project(x_new, o);

    const double step_norm = (x_new - out.x).norm();
    if (step_norm <= o.tol.step * (out.x.norm() + o.tol.step)) {
      out.converged = true;
      break;
    }

    const bool ok = f(x_new, r_new, J_new) && all_finite(r_new) && J_new.allFinite();
    const double cost_new = ok ? r_new.squaredNorm() : std::numeric_limits<double>::infinity();
    if (ok && cost_new < out.cost) {
      const double reduction = (out.cost - cost_new) / out.cost;
      out.x = x_new;
      out.cost = cost_new;
      r.swap(r_new);
      J.swap(J_new);
      out.trace.push_back(out.cost);
      out.iterates.push_back(out.x);
      lambda = std::max(lambda / 10.0, 1e-15);
      if (reduction <= o.tol.cost) {
        out.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e20) {
        // No descent even for vanishing steps: numerically stationary.
        out.converged = true;
        break;
      }
    }
  }
  return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
  LmOutcome lm;
  bool valid = false;
};

void check_data(const FitProblem& pr) {
  if (pr.data.kind != SeriesKind::DragRatio)
    fail(ErrorKind::InvalidProblem, "fitting needs a drag-ratio series; convert fuel ratios first");
  if (auto v = validate_series(pr.data); !v.empty()) fail(ErrorKind::InvalidProblem, describe(v));
  if (pr.max_iterations < 1) fail(ErrorKind::InvalidProblem, "max_iterations must be >= 1");
}

// Closed-form (a, c) for fixed b; returns the residual sum of squares.
double solve_linear_ac(std::span<const MeasurementPoint> d, double b, double& a, double& c) {
  double su = 0, suu = 0, sr = 0, sur = 0;
  const double n = static_cast<double>(d.size());
  for (const auto& p : d) {
    const double u = std::pow(p.gap_m, b);
    su += u;
    suu += u * u;
    sr += p.value;
    sur += u * p.value;
  }
  const double det = n * suu - su * su;
  if (!(std::abs(det) > 1e-300 * std::max(1.0, n * suu))) {
    a = 0.0;
    c = sr / n;
  } else {
    a = (n * sur - su * sr) / det;
    c = (sr - a * su) / n;
  }
  double rss = 0.0;
  for (const auto& p : d) {
    const double e = a * std::pow(p.gap_m, b) + c - p.value;
    rss += e * e;
  }
  return std::isfinite(rss) ? rss : kInf;
}

// Closed-form a for fixed (b, G_o) in the tied model.
double solve_linear_a(std::span<const MeasurementPoint> d, double b, double g_o, double& a) {
  const double gob = std::pow(g_o, b);
  double suu = 0, suy = 0;
  for (const auto& p : d) {
    if (p.gap_m >= g_o) continue;
    const double u = std::pow(p.gap_m, b) - gob;
    suu += u * u;
    suy += u * (p.value - 1.0);
  }
  a = suu > 0.0 ? suy / suu : 0.0;
  double rss = 0.0;
  for (const auto& p : d) {
    const double e = p.gap_m >= g_o ? 1.0 - p.value : a * (std::pow(p.gap_m, b) - gob) + 1.0 - p.value;
    rss += e * e;
  }
  return std::isfinite(rss) ? rss : kInf;
}

LmOutcome fit_power(const FitProblem& pr) {
  const auto& d = pr.data.points;
  const auto n = d.size();
  ResidualFn f = [&](const VectorXd& x, VectorXd& r, MatrixXd& J) {
    MatrixXd Jr(3, n);  // column-major 3 x n == row-major n x 3
    detail::power_residuals(x[0], x[1], x[2], d, std::span<double>(r.data(), n), std::span<double>(Jr.data(), 3 * n));
    J = Jr.transpose();
    return true;
  };
  LmOptions o;
  o.max_iterations = pr.max_iterations;
  o.tol = pr.tolerance;
  o.lower = VectorXd::Constant(3, -kInf);
  o.upper = VectorXd::Constant(3, kInf);

  std::vector<VectorXd> seeds;
  {
    double best = kInf;
    VectorXd s(3);
    for (double b : detail::exponent_grid()) {
      double a = 0, c = 0;
      const double rss = solve_linear_ac(d, b, a, c);
      if (rss < best) {
        best = rss;
        s << a, b, c;
      }
    }
    seeds.push_back(s);
  }
  if (pr.initial_guess) seeds.push_back((VectorXd(3) << pr.initial_guess->a, pr.initial_guess->b, pr.initial_guess->c).finished());

  std::optional<LmOutcome> best;
  std::string last_error;
  for (const auto& s : seeds) {
    try {
      auto lm = levenberg_marquardt(f, s, n, o);
      if (!best || lm.cost < best->cost) best = std::move(lm);
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (!best) fail(ErrorKind::NonConvergence, "3-parameter fit failed from every start: " + last_error);
  return *best;
}

struct TiedSetup {
  double g_lower = 0.0;
  double g_upper = kInf;
  bool bounded = false;
};

VectorXd tied_seed(std::span<const MeasurementPoint> d, double g_o, double* rss_out = nullptr) {
  double best = kInf;
  VectorXd s(3);
  s << 0.0, 1.0, g_o;
  for (double b : detail::exponent_grid()) {
    double a = 0;
    const double rss = solve_linear_a(d, b, g_o, a);
    if (rss < best) {
      best = rss;
      s << a, b, g_o;
    }
  }
  if (rss_out) *rss_out = best;
  return s;
}

// Breakpoint inside the data range: scan G_o over the geometric midpoints of
// consecutive gaps (at least three points below it) and keep the candidate
// whose profiled seed fits best.
std::optional<double> profile_start(std::span<const MeasurementPoint> d, double lo, double hi) {
  std::optional<double> pick;
  double best = kInf;
  for (std::size_t i = 3; i < d.size(); ++i) {
    const double g = std::sqrt(d[i - 1].gap_m * d[i].gap_m);
    if (g < lo || g > hi) continue;
    double rss = kInf;
    tied_seed(d, g, &rss);
    if (rss < best) {
      best = rss;
      pick = g;
    }
  }
  return pick;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return out;
}

struct TiedOutcome {
  LmOutcome lm;
  int starts = 0;
};

TiedOutcome fit_tied(const FitProblem& pr, const TiedSetup& setup, std::optional<double> root_hint) {
  const auto& d = pr.data.points;
  const auto n = d.size();
  ResidualFn f = [&](const VectorXd& x, VectorXd& r, MatrixXd& J) {
    if (!(x[2] > 0.0)) return false;
    MatrixXd Jr(3, n);
    detail::tied_residuals(x[0], x[1], x[2], d, std::span<double>(r.data(), n), std::span<double>(Jr.data(), 3 * n));
    J = Jr.transpose();
    return true;
  };
  LmOptions o;
  o.max_iterations = pr.max_iterations;
  o.tol = pr.tolerance;
  o.lower = (VectorXd(3) << -kInf, -kInf, setup.g_lower).finished();
  o.upper = (VectorXd(3) << kInf, kInf, setup.g_upper).finished();

  const double max_gap = pr.data.max_gap();
  std::vector<double> starts;
  if (setup.bounded) {
    for (int i = 0; i < 8; ++i) starts.push_back(setup.g_lower + (setup.g_upper - setup.g_lower) * i / 7.0);
  } else {
    starts = log_grid(max_gap, 10.0 * max_gap, 8);
  }
  auto clamp_start = [&](double g) { return std::clamp(g, setup.g_lower, setup.g_upper); };
  if (root_hint && std::isfinite(*root_hint) && *root_hint > 0.0) starts.push_back(clamp_start(*root_hint));
  if (pr.initial_guess && pr.initial_guess->g_o_m) starts.push_back(clamp_start(*pr.initial_guess->g_o_m));
  if (auto g = profile_start(d, setup.g_lower, setup.g_upper)) starts.push_back(*g);

  std::vector<VectorXd> seeds;
  for (double g : starts) seeds.push_back(tied_seed(d, g));
  if (pr.initial_guess && pr.initial_guess->g_o_m)
    seeds.push_back((VectorXd(3) << pr.initial_guess->a, pr.initial_guess->b, clamp_start(*pr.initial_guess->g_o_m)).finished());

  std::optional<LmOutcome> best;
  std::string last_error;
  int tried = 0;
  for (const auto& s : seeds) {
    ++tried;
    try {
      auto lm = levenberg_marquardt(f, s, n, o);
      if (!best) {
        best = std::move(lm);
        continue;
      }
      // Lowest RSS wins; near-equal RSS goes to the smaller G_o.
      const double tie = 1e-14 + 1e-9 * std::min(lm.cost, best->cost);
      if (lm.cost < best->cost - tie || (std::abs(lm.cost - best->cost) <= tie && lm.x[2] < best->x[2]))
        best = std::move(lm);
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (!best) fail(ErrorKind::NonConvergence, "4-parameter fit failed from every start: " + last_error);
  return {*best, tried};
}

std::optional<double> root_of(double a, double b, double c) {
  const double q = (1.0 - c) / a;
  if (!(q > 0.0) || b == 0.0) return std::nullopt;
  const double g = std::pow(q, 1.0 / b);
  if (!std::isfinite(g) || !(g > 0.0)) return std::nullopt;
  return g;
}

FitResult finish(const FitProblem& pr, const LmOutcome& lm, bool tied, int starts, const TiedSetup* setup) {
  FitResult res;
  res.include_g_o = tied;
  res.model.id = pr.id;
  res.model.position = pr.position;
  res.model.platoon_size = pr.platoon_size;
  res.model.a = lm.x[0];
  res.model.b = lm.x[1];
  if (tied) {
    res.model.g_o_m = lm.x[2];
    res.model.c = 1.0 - lm.x[0] * std::pow(lm.x[2], lm.x[1]);
    for (const auto& it : lm.iterates) res.g_o_trace.push_back(it[2]);
  } else {
    res.model.c = lm.x[2];
  }
  res.iterations = lm.iterations;
  res.converged = lm.converged;
  res.cost_trace = lm.trace;
  res.starts = starts;
  res.residual_sum_squares = fit_objective(res.model, pr.data, tied);
  if (setup && setup->bounded) {
    const double g = lm.x[2];
    if (g <= setup->g_lower) res.active_bounds.push_back(BoundSide::Lower);
    if (g >= setup->g_upper) res.active_bounds.push_back(BoundSide::Upper);
  }
  if (!(res.model.a * res.model.b > 0.0))
    res.warnings.push_back("a * b <= 0: fitted ratio is not increasing with gap");
  if (!res.converged) res.warnings.push_back("iteration limit reached before tolerances were met");
  return res;
}

}  // namespace

double fit_objective(const DragModel& m, const MeasurementSeries& data, bool piecewise) {
  double rss = 0.0;
  for (const auto& p : data.points) {
    const double pred = (piecewise && m.g_o_m && p.gap_m >= *m.g_o_m) ? 1.0 : power_branch(m, p.gap_m);
    const double e = pred - p.value;
    rss += e * e;
  }
  return rss;
}

FitResult fit_unconstrained(const FitProblem& pr) {
  if (pr.g_o_bounds) fail(ErrorKind::InvalidProblem, "fit_unconstrained called with G_o bounds; use fit_bounded");
  check_data(pr);
  const LmOutcome three = fit_power(pr);
  if (!pr.include_g_o) return finish(pr, three, false, 1, nullptr);
  TiedSetup setup;
  setup.g_lower = 1e-9;
  const auto tied = fit_tied(pr, setup, root_of(three.x[0], three.x[1], three.x[2]));
  return finish(pr, tied.lm, true, tied.starts + 1, &setup);
}

FitResult fit_bounded(const FitProblem& pr) {
  if (!pr.include_g_o) fail(ErrorKind::InvalidProblem, "G_o bounds require include_g_o");
  if (!pr.g_o_bounds) fail(ErrorKind::InvalidProblem, "fit_bounded needs G_o bounds");
  const auto [lo, hi] = *pr.g_o_bounds;
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && lo < hi))
    fail(ErrorKind::InvalidProblem, "G_o bounds must satisfy 0 < lower < upper, got [" + format_double(lo) + ", " +
                                        format_double(hi) + "]");
  if (pr.initial_guess && pr.initial_guess->g_o_m && !(*pr.initial_guess->g_o_m >= lo && *pr.initial_guess->g_o_m <= hi))
    fail(ErrorKind::InvalidProblem, "initial G_o lies outside the bounds");
  check_data(pr);
  const LmOutcome three = fit_power(pr);
  TiedSetup setup{lo, hi, true};
  const auto tied = fit_tied(pr, setup, root_of(three.x[0], three.x[1], three.x[2]));
  return finish(pr, tied.lm, true, tied.starts + 1, &setup);
}

FitResult fit(const FitProblem& pr) { return pr.g_o_bounds ? fit_bounded(pr) : fit_unconstrained(pr); }

double extrapolated_breakpoint(const FitResult& r) {
  if (r.include_g_o) fail(ErrorKind::InvalidProblem, "extrapolated_breakpoint expects a fit without G_o");
  DragModel m = r.model;
  m.g_o_m.reset();
  return effective_breakpoint(m);
}

}  // namespace platoon
