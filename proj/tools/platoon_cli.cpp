// platoon: command-line front end over the C API.
//
// Exit codes: 0 ok, 1 usage or I/O, 2 parse, 3 invalid problem (including
// domain errors), 4 non-convergence, 5 reproduction mismatch. Every failure
// prints one line "platoon-error: <category>: <message>" on stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "platoon/platoon.h"

#ifndef PLATOON_FIXTURE_DIR
#define PLATOON_FIXTURE_DIR "data"
#endif

namespace {

struct Failure {
  int exit_code;
  std::string category;
  std::string message;
};

int exit_code_for(platoon_status s) {
  switch (s) {
    case PLATOON_OK: return 0;
    case PLATOON_ERR_PARSE: return 2;
    case PLATOON_ERR_INVALID_PROBLEM:
    case PLATOON_ERR_DOMAIN:
    case PLATOON_ERR_NO_BREAKPOINT:
    case PLATOON_ERR_NO_POSITIVE_ROOT: return 3;
    case PLATOON_ERR_NON_CONVERGENCE: return 4;
    case PLATOON_ERR_MISMATCH: return 5;
    default: return 1;
  }
}

void check(platoon_status s) {
  if (s != PLATOON_OK) throw Failure{exit_code_for(s), platoon_status_name(s), platoon_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Vehicle = std::unique_ptr<platoon_vehicle, Deleter<platoon_vehicle, platoon_vehicle_free>>;
using Model = std::unique_ptr<platoon_model, Deleter<platoon_model, platoon_model_free>>;
using Series = std::unique_ptr<platoon_series, Deleter<platoon_series, platoon_series_free>>;
using FitResult = std::unique_ptr<platoon_fit_result, Deleter<platoon_fit_result, platoon_fit_result_free>>;
using Curve = std::unique_ptr<platoon_curve, Deleter<platoon_curve, platoon_curve_free>>;

std::string take(char* s) {
  std::string out = s ? s : "";
  platoon_string_free(s);
  return out;
}

// Files read and written by the command, for the manifest.
struct RunLog {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};
RunLog run_log;

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text)) throw Failure{1, "io", "cannot write '" + path + "'"};
  run_log.outputs.push_back(path);
}

Vehicle load_vehicle(const std::string& path, const std::string& name) {
  platoon_vehicle* v = nullptr;
  check(platoon_vehicle_load(path.c_str(), name.c_str(), &v));
  run_log.inputs.push_back(path);
  return Vehicle(v);
}

Series load_series(const std::string& path) {
  platoon_series* s = nullptr;
  check(platoon_series_load_csv(path.c_str(), &s));
  run_log.inputs.push_back(path);
  return Series(s);
}

// First file in `paths` holding the id; an empty id needs a single-model file.
Model find_model(const std::vector<std::string>& paths, const std::string& id) {
  if (paths.empty()) throw Failure{1, "usage", "no --models file given"};
  std::optional<Failure> last;
  for (const auto& p : paths) {
    platoon_model* m = nullptr;
    const auto s = platoon_model_load(p.c_str(), id.c_str(), &m);
    if (s == PLATOON_OK) {
      run_log.inputs.push_back(p);
      return Model(m);
    }
    last = Failure{exit_code_for(s), platoon_status_name(s), platoon_last_error()};
  }
  throw *last;
}

// Shortest form that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

platoon_position parse_position(const std::string& s) {
  if (s == "lead") return PLATOON_LEAD;
  if (s == "middle") return PLATOON_MIDDLE;
  return PLATOON_TRAIL;
}

// ---- fit ----

struct FitArgs {
  std::string data, spec, vehicle, out, report, id, position = "trail";
  bool include_go = true;
  std::vector<double> go_bounds, initial;
  double speed = 0.0, n = 1.0;
  int size = 2, max_iterations = 200;
};

int run_fit(const FitArgs& a) {
  Series data = load_series(a.data);
  platoon_series_kind kind{};
  check(platoon_series_kind_get(data.get(), &kind));
  if (kind == PLATOON_FUEL_RATIO) {
    if (a.spec.empty()) throw Failure{3, "invalid_problem", "fuel-ratio data needs --spec (and --vehicle) for inversion"};
    Vehicle v = load_vehicle(a.spec, a.vehicle);
    platoon_series* drag = nullptr;
    check(platoon_series_invert(data.get(), v.get(), a.speed, a.n, &drag));
    data.reset(drag);
  }

  platoon_fit_options o;
  platoon_fit_options_init(&o);
  o.include_g_o = a.include_go || !a.go_bounds.empty();
  if (!a.go_bounds.empty()) {
    o.has_bounds = 1;
    o.g_o_lower_m = a.go_bounds[0];
    o.g_o_upper_m = a.go_bounds[1];
  }
  if (!a.initial.empty()) {
    o.has_initial_guess = 1;
    o.initial_a = a.initial[0];
    o.initial_b = a.initial[1];
    o.initial_c = a.initial[2];
    if (a.initial.size() == 4) {
      o.initial_has_g_o = 1;
      o.initial_g_o_m = a.initial[3];
    }
  }
  o.max_iterations = a.max_iterations;
  o.position = parse_position(a.position);
  o.platoon_size = a.size;
  o.id = a.id.c_str();

  platoon_fit_result* raw = nullptr;
  check(platoon_fit(data.get(), &o, &raw));
  FitResult r(raw);

  platoon_model* m = nullptr;
  check(platoon_fit_model(r.get(), &m));
  Model model(m);
  char* text = nullptr;
  check(platoon_model_to_string(model.get(), &text));
  emit(take(text), a.out);
  if (!a.report.empty()) {
    char* rep = nullptr;
    check(platoon_fit_report_json(r.get(), &rep));
    emit(take(rep), a.report);
  }
  int converged = 0;
  check(platoon_fit_converged(r.get(), &converged));
  if (!converged) throw Failure{4, "non_convergence", "iteration limit reached before tolerances were met"};
  return 0;
}

// ---- invert ----

struct InvertArgs {
  std::string data, spec, vehicle, out;
  double speed = 0.0, n = 1.0;
};

int run_invert(const InvertArgs& a) {
  Series fuel = load_series(a.data);
  Vehicle v = load_vehicle(a.spec, a.vehicle);
  platoon_series* drag = nullptr;
  check(platoon_series_invert(fuel.get(), v.get(), a.speed, a.n, &drag));
  Series out(drag);
  char* csv = nullptr;
  check(platoon_series_to_csv(out.get(), &csv));
  emit(take(csv), a.out);
  return 0;
}

// ---- eval ----

struct EvalArgs {
  std::vector<std::string> models;
  std::string id, spec, vehicle, out;
  std::vector<double> gaps;
  double speed = 100.0;
};

int run_eval(const EvalArgs& a) {
  Model m = find_model(a.models, a.id);
  Vehicle v;
  if (!a.spec.empty()) v = load_vehicle(a.spec, a.vehicle);
  double bp = 0.0;
  check(platoon_model_breakpoint(m.get(), &bp));
  std::string text = "# breakpoint_m = " + num(bp) + "\n";
  text += v ? "gap_m,drag_ratio,fuel_reduction\n" : "gap_m,drag_ratio\n";
  for (double g : a.gaps) {
    double r = 0.0;
    check(platoon_model_drag_ratio(m.get(), g, &r));
    text += num(g) + "," + num(r);
    if (v) {
      double f = 0.0;
      check(platoon_fuel_reduction(v.get(), m.get(), g, a.speed, &f));
      text += "," + num(f);
    }
    text += '\n';
  }
  emit(text, a.out);
  return 0;
}

// ---- curve ----

struct CurveArgs {
  std::string spec, vehicle, lead, middle, trail, abscissa = "gap", format = "csv", out;
  std::vector<std::string> models;
  std::vector<double> range;
  std::optional<double> payload;
  double speed = 100.0, step = 1.0;
  int size = 2;
};

int run_curve(const CurveArgs& a) {
  Vehicle v = load_vehicle(a.spec, a.vehicle);
  if (a.payload) check(platoon_vehicle_set_payload(v.get(), *a.payload));
  Model lead = find_model(a.models, a.lead);
  Model trail = find_model(a.models, a.trail);
  Model middle;
  if (!a.middle.empty()) middle = find_model(a.models, a.middle);
  const auto abscissa = a.abscissa == "time" ? PLATOON_TIME_S : PLATOON_GAP_M;
  platoon_curve* raw = nullptr;
  check(platoon_curve_compute(v.get(), lead.get(), middle.get(), trail.get(), a.size, a.speed, abscissa, a.range[0],
                              a.range[1], a.step, &raw));
  Curve c(raw);
  char* text = nullptr;
  check(a.format == "json" ? platoon_curve_json(c.get(), &text) : platoon_curve_csv(c.get(), &text));
  emit(take(text), a.out);
  return 0;
}

// ---- headway ----

struct HeadwayArgs {
  std::string spec, vehicle;
  double gap_time = 0.5, speed = 100.0;
};

int run_headway(const HeadwayArgs& a) {
  Vehicle v = load_vehicle(a.spec, a.vehicle);
  double h = 0.0, flow = 0.0;
  check(platoon_headway(v.get(), a.gap_time, a.speed, &h, &flow));
  std::cout << "headway_s,flow_veh_per_hr\n" << num(h) << ',' << num(flow) << '\n';
  return 0;
}

// ---- reproduce ----

struct ReproduceArgs {
  std::string target, fixtures = PLATOON_FIXTURE_DIR;
};

int run_reproduce(const ReproduceArgs& a) {
  char* report = nullptr;
  int failures = 0;
  const auto s = platoon_reproduce(a.target.c_str(), a.fixtures.c_str(), &report, &failures);
  if (report) std::cout << take(report);
  run_log.inputs.push_back(a.fixtures + "/vehicles.kv");
  run_log.inputs.push_back(a.fixtures + "/table2.kv");
  check(s);
  return 0;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& path, const CLI::App& app, int argc, char** argv) {
  nlohmann::ordered_json j;
  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);
  j["command"] = command;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& p : run_log.inputs) {
    char* hex = nullptr;
    if (platoon_sha256_file(p.c_str(), &hex) == PLATOON_OK) inputs[p] = take(hex);
  }
  j["inputs"] = inputs;
  j["config"] = app.config_to_str(true, false);
  j["outputs"] = run_log.outputs;
  j["timestamp"] = utc_timestamp();
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << j.dump(2) << '\n')) throw Failure{1, "io", "cannot write manifest '" + path + "'"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gap-dependent drag models for vehicle platoons: fitting, fuel inversion, savings curves"};
  app.set_config("--config", "", "Defaults file (key = value, one [section] per subcommand)");
  std::string manifest;
  app.add_option("--manifest", manifest, "Write a run manifest (inputs with SHA-256, config, outputs) as JSON");
  app.require_subcommand(1);
  app.footer(
      "Outputs:\n"
      "  fit      model record (key = value), optional JSON report\n"
      "  invert   CSV gap_m,ratio,source\n"
      "  eval     CSV gap_m,drag_ratio[,fuel_reduction]\n"
      "  curve    CSV gap_m|time_s,lead,middle_2..,trail,average (fuel reduction ratios, negative = saving)\n"
      "           or JSON with speed, vehicle and model digests\n"
      "Exit codes: 0 ok, 1 usage/io, 2 parse, 3 invalid problem, 4 non-convergence, 5 reproduction mismatch");

  const auto positions = CLI::IsMember({"lead", "middle", "trail"});

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit a drag model to a measurement CSV");
  fit->add_option("--data", fa.data, "CSV with gap_m,ratio or gap_m,fuel_ratio,speed_kmh")->required();
  fit->add_flag("--include-go,!--exclude-go", fa.include_go, "Fit the breakpoint G_o (default) or a 3-parameter curve");
  fit->add_option("--go-bounds", fa.go_bounds, "Lower and upper bound on G_o in m")->expected(2);
  fit->add_option("--initial", fa.initial, "Initial guess a b c [G_o]")->expected(3, 4);
  fit->add_option("--spec", fa.spec, "Vehicle file, needed for fuel-ratio data");
  fit->add_option("--vehicle", fa.vehicle, "Vehicle name inside --spec");
  fit->add_option("--speed", fa.speed, "Override the recorded speed of fuel-ratio data (km/h)");
  fit->add_option("--n", fa.n, "Fuel scale of the inversion")->check(CLI::PositiveNumber);
  fit->add_option("--position", fa.position, "Position label of the fitted model")->check(positions);
  fit->add_option("--size", fa.size, "Platoon size label")->check(CLI::Range(2, 1000));
  fit->add_option("--id", fa.id, "Model id");
  fit->add_option("--max-iterations", fa.max_iterations, "Iteration limit per start")->check(CLI::Range(1, 100000));
  fit->add_option("--out", fa.out, "Model output file (default stdout)");
  fit->add_option("--report", fa.report, "JSON fit report file");

  InvertArgs ia;
  auto* inv = app.add_subcommand("invert", "Convert a fuel-ratio CSV into drag ratios");
  inv->add_option("--data", ia.data, "CSV with gap_m,fuel_ratio,speed_kmh")->required();
  inv->add_option("--spec", ia.spec, "Vehicle file")->required();
  inv->add_option("--vehicle", ia.vehicle, "Vehicle name inside --spec");
  inv->add_option("--speed", ia.speed, "Override the recorded speed (km/h)");
  inv->add_option("--n", ia.n, "Fuel scale")->check(CLI::PositiveNumber);
  inv->add_option("--out", ia.out, "Output CSV (default stdout)");

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Evaluate a drag model at given gaps");
  ev->add_option("--models", ea.models, "Model file(s)")->required();
  ev->add_option("--id", ea.id, "Model id");
  ev->add_option("--gap", ea.gaps, "Distance gap(s) in m")->required();
  ev->add_option("--spec", ea.spec, "Vehicle file, adds a fuel_reduction column");
  ev->add_option("--vehicle", ea.vehicle, "Vehicle name inside --spec");
  ev->add_option("--speed", ea.speed, "Speed for fuel_reduction (km/h)");
  ev->add_option("--out", ea.out, "Output CSV (default stdout)");

  CurveArgs ca;
  auto* cur = app.add_subcommand("curve", "Fuel-reduction curve of a homogeneous platoon");
  cur->add_option("--spec", ca.spec, "Vehicle file")->required();
  cur->add_option("--vehicle", ca.vehicle, "Vehicle name inside --spec");
  cur->add_option("--payload", ca.payload, "Override the vehicle payload (kg)");
  cur->add_option("--models", ca.models, "Model file(s), searched in order")->required();
  cur->add_option("--lead", ca.lead, "Lead model id")->required();
  cur->add_option("--middle", ca.middle, "Middle model id (platoons of 3 or more)");
  cur->add_option("--trail", ca.trail, "Trail model id")->required();
  cur->add_option("--size", ca.size, "Platoon size")->check(CLI::Range(2, 1000));
  cur->add_option("--speed", ca.speed, "Speed (km/h)");
  cur->add_option("--abscissa", ca.abscissa, "gap (m) or time (s)")->check(CLI::IsMember({"gap", "time"}));
  cur->add_option("--range", ca.range, "Start and stop")->expected(2)->required();
  cur->add_option("--step", ca.step, "Sample spacing")->check(CLI::PositiveNumber);
  cur->add_option("--format", ca.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cur->add_option("--out", ca.out, "Output file (default stdout)");

  HeadwayArgs ha;
  auto* hw = app.add_subcommand("headway", "Headway and saturation flow for a time gap");
  hw->add_option("--spec", ha.spec, "Vehicle file")->required();
  hw->add_option("--vehicle", ha.vehicle, "Vehicle name inside --spec");
  hw->add_option("--gap-time", ha.gap_time, "Time gap (s)");
  hw->add_option("--speed", ha.speed, "Speed (km/h)");

  ReproduceArgs ra;
  auto* rep = app.add_subcommand("reproduce", "Compare computed values against the published ones");
  rep->add_option("target", ra.target, "table2, headways or savings_summary")
      ->required()
      ->check(CLI::IsMember({"table2", "headways", "savings_summary"}));
  rep->add_option("--fixtures", ra.fixtures, "Fixture directory with vehicles.kv and table2.kv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      std::cerr << "platoon-error: usage: " << e.what() << "\n";
      return 1;
    }
    return app.exit(e);
  }

  int code = 0;
  std::optional<Failure> failure;
  try {
    if (*fit)
      code = run_fit(fa);
    else if (*inv)
      code = run_invert(ia);
    else if (*ev)
      code = run_eval(ea);
    else if (*cur)
      code = run_curve(ca);
    else if (*hw)
      code = run_headway(ha);
    else if (*rep)
      code = run_reproduce(ra);
  } catch (const Failure& f) {
    failure = f;
    code = f.exit_code;
  }
  if (!manifest.empty()) {
    try {
      write_manifest(manifest, app, argc, argv);
    } catch (const Failure& f) {
      if (!failure) failure = f, code = f.exit_code;
    }
  }
  if (failure) std::cerr << "platoon-error: " << failure->category << ": " << failure->message << "\n";
  return code;
}
