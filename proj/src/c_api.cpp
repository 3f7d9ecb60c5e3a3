#include "platoon/platoon.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "platoon/analysis.hpp"
#include "platoon/digest.hpp"
#include "platoon/drag_model.hpp"
#include "platoon/error.hpp"
#include "platoon/fitter.hpp"
#include "platoon/inversion.hpp"
#include "platoon/measurement_csv.hpp"
#include "platoon/records.hpp"
#include "platoon/report.hpp"
#include "platoon/reproduce.hpp"

struct platoon_vehicle {
  platoon::VehicleSpec spec;
};
struct platoon_model {
  platoon::DragModel model;
};
struct platoon_series {
  platoon::MeasurementSeries series;
};
struct platoon_fit_result {
  platoon::FitResult result;
  platoon::MeasurementSeries data;
};
struct platoon_curve {
  platoon::SavingsCurve curve;
  platoon::VehicleSpec spec;
  std::vector<platoon::DragModel> models;
};

namespace {

thread_local std::string last_error;

platoon_status status_of(platoon::ErrorKind k) {
  using platoon::ErrorKind;
  switch (k) {
    case ErrorKind::Parse: return PLATOON_ERR_PARSE;
    case ErrorKind::InvalidProblem: return PLATOON_ERR_INVALID_PROBLEM;
    case ErrorKind::NonConvergence: return PLATOON_ERR_NON_CONVERGENCE;
    case ErrorKind::Domain: return PLATOON_ERR_DOMAIN;
    case ErrorKind::NoBreakpoint: return PLATOON_ERR_NO_BREAKPOINT;
    case ErrorKind::NoPositiveRoot: return PLATOON_ERR_NO_POSITIVE_ROOT;
    case ErrorKind::Io: return PLATOON_ERR_IO;
  }
  return PLATOON_ERR_INTERNAL;
}

template <class F>
platoon_status guarded(F&& f) {
  last_error.clear();
  try {
    return f();
  } catch (const platoon::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown exception";
  }
  return PLATOON_ERR_INTERNAL;
}

platoon_status argument_error(const char* what) {
  last_error = what;
  return PLATOON_ERR_ARGUMENT;
}

#define PLATOON_REQUIRE(cond) \
  do {                        \
    if (!(cond)) return argument_error("null or invalid argument: " #cond); \
  } while (0)

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

std::string_view opt(const char* s) { return s ? std::string_view(s) : std::string_view(); }

platoon::Position to_cpp(platoon_position p) {
  switch (p) {
    case PLATOON_LEAD: return platoon::Position::Lead;
    case PLATOON_MIDDLE: return platoon::Position::Middle;
    case PLATOON_TRAIL: return platoon::Position::Trail;
  }
  platoon::fail(platoon::ErrorKind::InvalidProblem, "unknown position");
}

platoon_position to_c(platoon::Position p) {
  switch (p) {
    case platoon::Position::Lead: return PLATOON_LEAD;
    case platoon::Position::Middle: return PLATOON_MIDDLE;
    case platoon::Position::Trail: return PLATOON_TRAIL;
  }
  return PLATOON_TRAIL;
}

}  // namespace

extern "C" {

const char* platoon_version(void) { return "0.1.0"; }

const char* platoon_last_error(void) { return last_error.c_str(); }

const char* platoon_status_name(platoon_status s) {
  switch (s) {
    case PLATOON_OK: return "ok";
    case PLATOON_ERR_PARSE: return "parse";
    case PLATOON_ERR_INVALID_PROBLEM: return "invalid_problem";
    case PLATOON_ERR_NON_CONVERGENCE: return "non_convergence";
    case PLATOON_ERR_MISMATCH: return "reproduction_mismatch";
    case PLATOON_ERR_DOMAIN: return "domain";
    case PLATOON_ERR_NO_BREAKPOINT: return "no_breakpoint";
    case PLATOON_ERR_NO_POSITIVE_ROOT: return "no_positive_root";
    case PLATOON_ERR_IO: return "io";
    case PLATOON_ERR_ARGUMENT: return "argument";
    case PLATOON_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void platoon_string_free(char* s) { std::free(s); }

// ---- vehicles ----

platoon_status platoon_vehicle_load(const char* path, const char* name, platoon_vehicle** out) {
  PLATOON_REQUIRE(path && out);
  return guarded([&] {
    *out = new platoon_vehicle{platoon::load_vehicle(path, opt(name))};
    return PLATOON_OK;
  });
}

platoon_status platoon_vehicle_params_get(const platoon_vehicle* v, platoon_vehicle_params* out) {
  PLATOON_REQUIRE(v && out);
  const auto& s = v->spec;
  *out = {s.mass_kg,    s.length_m,   s.width_m,    s.height_m,   s.frontal_area_m2,
          s.cd_infinity, s.driveline_efficiency, s.alpha0, s.alpha1, s.alpha2,
          s.rolling_cr, s.rolling_c1, s.rolling_c2, s.altitude_correction, s.payload_kg};
  return PLATOON_OK;
}

platoon_status platoon_vehicle_set_payload(platoon_vehicle* v, double payload_kg) {
  PLATOON_REQUIRE(v);
  if (!(payload_kg >= 0.0 && std::isfinite(payload_kg))) {
    last_error = "payload_kg must be finite and >= 0";
    return PLATOON_ERR_INVALID_PROBLEM;
  }
  v->spec.payload_kg = payload_kg;
  return PLATOON_OK;
}

platoon_status platoon_vehicle_digest(const platoon_vehicle* v, char** out_hex) {
  PLATOON_REQUIRE(v && out_hex);
  return guarded([&] {
    *out_hex = dup_string(platoon::digest_of(v->spec));
    return PLATOON_OK;
  });
}

void platoon_vehicle_free(platoon_vehicle* v) { delete v; }

// ---- drag models ----

platoon_status platoon_model_create(const platoon_model_params* p, const char* id, platoon_model** out) {
  PLATOON_REQUIRE(p && out);
  return guarded([&] {
    platoon::DragModel m;
    m.id = std::string(opt(id));
    m.a = p->a;
    m.b = p->b;
    m.c = p->c;
    if (p->has_g_o) m.g_o_m = p->g_o_m;
    m.position = to_cpp(p->position);
    m.platoon_size = p->platoon_size;
    if (auto v = platoon::validate_model(m); !v.empty())
      platoon::fail(platoon::ErrorKind::InvalidProblem, platoon::describe(v));
    *out = new platoon_model{std::move(m)};
    return PLATOON_OK;
  });
}

platoon_status platoon_model_load(const char* path, const char* id, platoon_model** out) {
  PLATOON_REQUIRE(path && out);
  return guarded([&] {
    *out = new platoon_model{platoon::load_model(path, opt(id))};
    return PLATOON_OK;
  });
}

platoon_status platoon_model_params_get(const platoon_model* m, platoon_model_params* out) {
  PLATOON_REQUIRE(m && out);
  const auto& d = m->model;
  *out = {d.a, d.b, d.c, d.g_o_m ? 1 : 0, d.g_o_m.value_or(0.0), to_c(d.position), d.platoon_size};
  return PLATOON_OK;
}

platoon_status platoon_model_write(const platoon_model* m, const char* path) {
  PLATOON_REQUIRE(m && path);
  return guarded([&] {
    platoon::write_text_file(path, platoon::format_records({platoon::to_record(m->model)}));
    return PLATOON_OK;
  });
}

platoon_status platoon_model_to_string(const platoon_model* m, char** out) {
  PLATOON_REQUIRE(m && out);
  return guarded([&] {
    *out = dup_string(platoon::format_records({platoon::to_record(m->model)}));
    return PLATOON_OK;
  });
}

platoon_status platoon_model_drag_ratio(const platoon_model* m, double gap_m, double* out) {
  PLATOON_REQUIRE(m && out);
  return guarded([&] {
    *out = platoon::drag_ratio(m->model, gap_m);
    return PLATOON_OK;
  });
}

platoon_status platoon_model_breakpoint(const platoon_model* m, double* out_m) {
  PLATOON_REQUIRE(m && out_m);
  return guarded([&] {
    *out_m = platoon::effective_breakpoint(m->model);
    return PLATOON_OK;
  });
}

void platoon_model_free(platoon_model* m) { delete m; }

// ---- series ----

platoon_status platoon_series_load_csv(const char* path, platoon_series** out) {
  PLATOON_REQUIRE(path && out);
  return guarded([&] {
    *out = new platoon_series{platoon::read_measurement_csv(path)};
    return PLATOON_OK;
  });
}

platoon_status platoon_series_write_csv(const platoon_series* s, const char* path) {
  PLATOON_REQUIRE(s && path);
  return guarded([&] {
    platoon::write_text_file(path, platoon::format_measurement_csv(s->series));
    return PLATOON_OK;
  });
}

platoon_status platoon_series_to_csv(const platoon_series* s, char** out) {
  PLATOON_REQUIRE(s && out);
  return guarded([&] {
    *out = dup_string(platoon::format_measurement_csv(s->series));
    return PLATOON_OK;
  });
}

platoon_status platoon_series_kind_get(const platoon_series* s, platoon_series_kind* out) {
  PLATOON_REQUIRE(s && out);
  *out = s->series.kind == platoon::SeriesKind::FuelRatio ? PLATOON_FUEL_RATIO : PLATOON_DRAG_RATIO;
  return PLATOON_OK;
}

platoon_status platoon_series_size(const platoon_series* s, size_t* out) {
  PLATOON_REQUIRE(s && out);
  *out = s->series.points.size();
  return PLATOON_OK;
}

platoon_status platoon_series_point(const platoon_series* s, size_t index, double* gap_m, double* value) {
  PLATOON_REQUIRE(s && gap_m && value);
  if (index >= s->series.points.size()) return argument_error("point index out of range");
  *gap_m = s->series.points[index].gap_m;
  *value = s->series.points[index].value;
  return PLATOON_OK;
}

platoon_status platoon_series_invert(const platoon_series* fuel, const platoon_vehicle* v, double speed_kmh,
                                     double n, platoon_series** out) {
  PLATOON_REQUIRE(fuel && v && out);
  return guarded([&] {
    platoon::MeasurementSeries in = fuel->series;
    if (speed_kmh > 0.0) in.speed_kmh = speed_kmh;
    *out = new platoon_series{platoon::series_fuel_to_drag(in, v->spec, {}, n)};
    return PLATOON_OK;
  });
}

void platoon_series_free(platoon_series* s) { delete s; }

// ---- fitting ----

void platoon_fit_options_init(platoon_fit_options* o) {
  if (!o) return;
  *o = platoon_fit_options{};
  o->include_g_o = 1;
  o->max_iterations = 200;
  o->tol_gradient = o->tol_step = o->tol_cost = 1e-10;
  o->position = PLATOON_TRAIL;
  o->platoon_size = 2;
}

platoon_status platoon_fit(const platoon_series* data, const platoon_fit_options* o, platoon_fit_result** out) {
  PLATOON_REQUIRE(data && o && out);
  return guarded([&] {
    platoon::FitProblem p;
    p.data = data->series;
    p.include_g_o = o->include_g_o != 0;
    if (o->has_bounds) p.g_o_bounds = platoon::GoBounds{o->g_o_lower_m, o->g_o_upper_m};
    if (o->has_initial_guess) {
      platoon::FitInitialGuess g{o->initial_a, o->initial_b, o->initial_c, std::nullopt};
      if (o->initial_has_g_o) g.g_o_m = o->initial_g_o_m;
      p.initial_guess = g;
    }
    p.max_iterations = o->max_iterations;
    p.tolerance = {o->tol_gradient, o->tol_step, o->tol_cost};
    p.id = std::string(opt(o->id));
    p.position = to_cpp(o->position);
    p.platoon_size = o->platoon_size;
    *out = new platoon_fit_result{platoon::fit(p), data->series};
    return PLATOON_OK;
  });
}

platoon_status platoon_fit_model(const platoon_fit_result* r, platoon_model** out) {
  PLATOON_REQUIRE(r && out);
  return guarded([&] {
    *out = new platoon_model{r->result.model};
    return PLATOON_OK;
  });
}

platoon_status platoon_fit_rss(const platoon_fit_result* r, double* out) {
  PLATOON_REQUIRE(r && out);
  *out = r->result.residual_sum_squares;
  return PLATOON_OK;
}

platoon_status platoon_fit_iterations(const platoon_fit_result* r, int* out) {
  PLATOON_REQUIRE(r && out);
  *out = r->result.iterations;
  return PLATOON_OK;
}

platoon_status platoon_fit_converged(const platoon_fit_result* r, int* out) {
  PLATOON_REQUIRE(r && out);
  *out = r->result.converged ? 1 : 0;
  return PLATOON_OK;
}

platoon_status platoon_fit_active_bounds(const platoon_fit_result* r, int* out_flags) {
  PLATOON_REQUIRE(r && out_flags);
  int flags = 0;
  for (auto b : r->result.active_bounds) flags |= b == platoon::BoundSide::Lower ? PLATOON_BOUND_LOWER : PLATOON_BOUND_UPPER;
  *out_flags = flags;
  return PLATOON_OK;
}

platoon_status platoon_fit_extrapolated_breakpoint(const platoon_fit_result* r, double* out_m) {
  PLATOON_REQUIRE(r && out_m);
  return guarded([&] {
    *out_m = platoon::extrapolated_breakpoint(r->result);
    return PLATOON_OK;
  });
}

platoon_status platoon_fit_report_json(const platoon_fit_result* r, char** out) {
  PLATOON_REQUIRE(r && out);
  return guarded([&] {
    *out = dup_string(platoon::fit_report_json(r->result, r->data));
    return PLATOON_OK;
  });
}

void platoon_fit_result_free(platoon_fit_result* r) { delete r; }

// ---- analysis ----

platoon_status platoon_fuel_reduction(const platoon_vehicle* v, const platoon_model* m, double gap_m, double speed_kmh,
                                      double* out) {
  PLATOON_REQUIRE(v && m && out);
  return guarded([&] {
    *out = platoon::fuel_reduction(v->spec, m->model, gap_m, speed_kmh);
    return PLATOON_OK;
  });
}

platoon_status platoon_headway(const platoon_vehicle* v, double gap_time_s, double speed_kmh, double* headway_s,
                               double* flow) {
  PLATOON_REQUIRE(v && headway_s && flow);
  return guarded([&] {
    const auto hf = platoon::headway_and_flow(v->spec, gap_time_s, speed_kmh);
    *headway_s = hf.headway_s;
    *flow = hf.flow_veh_per_hr;
    return PLATOON_OK;
  });
}

platoon_status platoon_curve_compute(const platoon_vehicle* v, const platoon_model* lead, const platoon_model* middle,
                                     const platoon_model* trail, int size, double speed_kmh,
                                     platoon_abscissa abscissa, double start, double stop, double step,
                                     platoon_curve** out) {
  PLATOON_REQUIRE(v && lead && trail && out);
  return guarded([&] {
    platoon::PlatoonConfig cfg;
    cfg.vehicle = v->spec;
    cfg.size = size;
    cfg.speed_kmh = speed_kmh;
    cfg.models[platoon::Position::Lead] = lead->model;
    cfg.models[platoon::Position::Trail] = trail->model;
    if (middle) cfg.models[platoon::Position::Middle] = middle->model;
    const auto kind = abscissa == PLATOON_TIME_S ? platoon::Abscissa::TimeGap : platoon::Abscissa::DistanceGap;
    auto curve = platoon::savings_curve(cfg, kind, {start, stop, step});
    std::vector<platoon::DragModel> models;
    for (const auto* m : cfg.position_models())
      if (models.empty() || !(models.back() == *m)) models.push_back(*m);
    *out = new platoon_curve{std::move(curve), cfg.vehicle, std::move(models)};
    return PLATOON_OK;
  });
}

platoon_status platoon_curve_csv(const platoon_curve* c, char** out) {
  PLATOON_REQUIRE(c && out);
  return guarded([&] {
    *out = dup_string(platoon::curve_csv(c->curve));
    return PLATOON_OK;
  });
}

platoon_status platoon_curve_json(const platoon_curve* c, char** out) {
  PLATOON_REQUIRE(c && out);
  return guarded([&] {
    *out = dup_string(platoon::curve_json(c->curve, c->spec, c->models));
    return PLATOON_OK;
  });
}

void platoon_curve_free(platoon_curve* c) { delete c; }

// ---- reproduction and digests ----

platoon_status platoon_reproduce(const char* target, const char* fixture_dir, char** out_report, int* out_failures) {
  PLATOON_REQUIRE(target && fixture_dir && out_report);
  return guarded([&] {
    const auto t = platoon::parse_repro_target(target);
    if (!t)
      platoon::fail(platoon::ErrorKind::InvalidProblem,
                    std::string("unknown reproduce target '") + target + "' (table2, headways, savings_summary)");
    const auto rep = platoon::reproduce(*t, fixture_dir);
    *out_report = dup_string(platoon::format_report(rep));
    const int failures = rep.failures();
    if (out_failures) *out_failures = failures;
    if (failures > 0) {
      last_error = std::to_string(failures) + " reproduction line(s) failed";
      return PLATOON_ERR_MISMATCH;
    }
    return PLATOON_OK;
  });
}

platoon_status platoon_sha256_file(const char* path, char** out_hex) {
  PLATOON_REQUIRE(path && out_hex);
  return guarded([&] {
    *out_hex = dup_string(platoon::sha256_file(path));
    return PLATOON_OK;
  });
}

}  // extern "C"
