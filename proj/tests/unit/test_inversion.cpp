#include <doctest.h>

#include <cmath>

#include "platoon/drag_model.hpp"
#include "platoon/error.hpp"
#include "platoon/fuel_model.hpp"
#include "platoon/inversion.hpp"
#include "platoon/measurement_csv.hpp"
#include "support.hpp"

using namespace platoon;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

const DrivingState cruise{100.0, 0.0, 0.0};

}  // namespace

TEST_CASE("zero fuel reduction returns the isolated fuel rate") {
  const auto s = test::vehicle("hdt_mcauliffe");
  const double f_inf = fuel_rate(s, power_kw(s, s.cd_infinity, cruise, {}));
  CHECK(fuel_from_ratio(0.0, s, cruise, {}) == f_inf);
  CHECK(fuel_from_ratio(0.1, s, cruise, {}) == doctest::Approx(0.9 * f_inf).epsilon(1e-15));
  // Hand evaluation of the truck's isolated fuel rate.
  CHECK(f_inf == doctest::Approx(0.018358701979351393).epsilon(1e-12));
}

TEST_CASE("fuel ratio of 1 or more is a domain error") {
  const auto s = test::vehicle("hdt_mcauliffe");
  CHECK(kind_of([&] { fuel_from_ratio(1.0, s, cruise, {}); }) == ErrorKind::Domain);
  CHECK(kind_of([&] { fuel_from_ratio(1.5, s, cruise, {}); }) == ErrorKind::Domain);
}

TEST_CASE("idle fuel maps to zero power") {
  const auto s = test::vehicle("ldv_a");
  CHECK(power_from_fuel(s, s.alpha0) == 0.0);
  CHECK(power_from_fuel(s, 3.0 * s.alpha0, 3.0) == 0.0);
}

TEST_CASE("fuel below idle has no positive root") {
  auto s = test::vehicle("ldv_a");
  CHECK(kind_of([&] { power_from_fuel(s, 0.99 * s.alpha0); }) == ErrorKind::NoPositiveRoot);
  s.alpha2 = 10.0;
  CHECK(kind_of([&] { power_from_fuel(s, s.alpha0 - 1e-9); }) == ErrorKind::NoPositiveRoot);
}

TEST_CASE("linear fuel map inverts linearly") {
  auto s = test::vehicle("ldv_a");
  s.alpha2 = 0.0;
  CHECK(power_from_fuel(s, fuel_rate(s, 42.0)) == doctest::Approx(42.0).epsilon(1e-14));
}

TEST_CASE("power to fuel and back") {
  const auto s = test::vehicle("ldv_a");
  const double p = power_from_fuel(s, fuel_rate(s, 75.0));
  CHECK(test::rel_err(p, 75.0) <= 1e-9);
}

TEST_CASE("inverse pair over power and fuel scale") {
  for (const auto& s : load_vehicles(test::fixture("vehicles.kv"))) {
    CAPTURE(s.name);
    for (double n : {0.5, 1.0, 3.0}) {
      for (double p = 0.5; p <= 400.0; p += 0.5) {
        const double back = power_from_fuel(s, n * fuel_rate(s, p), n);
        CHECK(test::rel_err(back, p) <= 1e-9);
      }
    }
  }
}

TEST_CASE("isolated power gives back the isolated drag coefficient") {
  for (const auto& s : load_vehicles(test::fixture("vehicles.kv"))) {
    const double p = power_kw(s, s.cd_infinity, cruise, {});
    CHECK(std::abs(cd_from_power(s, p, cruise, {}) - s.cd_infinity) <= 1e-9);
  }
}

TEST_CASE("ten percent fuel reduction on the truck") {
  const auto s = test::vehicle("hdt_mcauliffe");
  const double cd = cd_from_power(s, power_from_fuel(s, fuel_from_ratio(0.1, s, cruise, {})), cruise, {});
  CHECK(cd < s.cd_infinity);
  // Independent evaluation of the quadratic and force relation.
  CHECK(cd == doctest::Approx(0.4252483014030432).epsilon(1e-10));
}

TEST_CASE("drag to fuel to drag round trip") {
  for (const auto& s : load_vehicles(test::fixture("vehicles.kv"))) {
    CAPTURE(s.name);
    for (double v : {60.0, 80.0, 100.0}) {
      const DrivingState st{v, 0.0, 0.0};
      const double f_inf = fuel_rate(s, power_kw(s, s.cd_infinity, st, {}));
      for (double cd = 0.2; cd <= 1.0 + 1e-12; cd += 0.01) {
        const double delta = (f_inf - fuel_rate(s, power_kw(s, cd, st, {}))) / f_inf;
        const double back = cd_from_power(s, power_from_fuel(s, fuel_from_ratio(delta, s, st, {})), st, {});
        CHECK(test::rel_err(back, cd) <= 1e-6);
      }
    }
  }
}

TEST_CASE("round trip holds with acceleration and grade") {
  const auto s = test::vehicle("bus_n");
  const DrivingState st{70.0, 0.4, 0.02};
  const double p = power_kw(s, 0.45, st, {});
  CHECK(test::rel_err(cd_from_power(s, power_from_fuel(s, fuel_rate(s, p)), st, {}), 0.45) <= 1e-9);
}

TEST_CASE("zero speed cannot be inverted") {
  const auto s = test::vehicle("ldv_a");
  CHECK(kind_of([&] { cd_from_power(s, 10.0, {0.0, 0.0, 0.0}, {}); }) == ErrorKind::Domain);
}

TEST_CASE("larger fuel reduction means smaller drag") {
  const auto s = test::vehicle("hdt_mcauliffe");
  double prev = 1e9;
  for (double d = -0.2; d <= 0.3; d += 0.01) {
    const double cd = cd_from_power(s, power_from_fuel(s, fuel_from_ratio(d, s, cruise, {})), cruise, {});
    CHECK(cd < prev);
    prev = cd;
  }
}

TEST_CASE("all-zero fuel ratios give unit drag ratios") {
  MeasurementSeries fuel;
  fuel.kind = SeriesKind::FuelRatio;
  fuel.speed_kmh = 100.0;
  fuel.points = {{3, 0}, {4, 0}, {5, 0}, {6, 0}};
  const auto drag = series_fuel_to_drag(fuel, test::vehicle("hdt_mcauliffe"));
  CHECK(drag.kind == SeriesKind::DragRatio);
  for (std::size_t i = 0; i < drag.points.size(); ++i) {
    CHECK(drag.points[i].gap_m == fuel.points[i].gap_m);
    CHECK(drag.points[i].value == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("forward then invert recovers the drag ratios") {
  const auto s = test::vehicle("hdt_mcauliffe");
  const auto m = test::model("hdt3_middle");
  const double f_inf = steady_fuel_rate(s, s.cd_infinity, 90.0, {});
  MeasurementSeries fuel;
  fuel.kind = SeriesKind::FuelRatio;
  fuel.speed_kmh = 90.0;
  for (double g = 5.0; g <= 200.0; g += 15.0)
    fuel.points.push_back({g, (f_inf - steady_fuel_rate(s, s.cd_infinity * drag_ratio(m, g), 90.0, {})) / f_inf});
  for (double n : {1.0, 2.5}) {
    const auto drag = series_fuel_to_drag(fuel, s, {}, n);
    for (const auto& p : drag.points) CHECK(test::rel_err(p.value, drag_ratio(m, p.gap_m)) <= 1e-6);
  }
}

TEST_CASE("two-HDT lead fuel data inverts to a ratio rising toward 1") {
  const auto fuel = read_measurement_csv(test::fixture("measurements/hdt2_lead.csv"));
  const auto drag = series_fuel_to_drag(fuel, test::vehicle("hdt_mcauliffe"));
  for (std::size_t i = 1; i < drag.points.size(); ++i) CHECK(drag.points[i].value > drag.points[i - 1].value);
  CHECK(drag.points.back().value < 1.0);
  CHECK(drag.points.back().value > 0.8);
}

TEST_CASE("pointwise inversion errors carry the point index") {
  MeasurementSeries fuel;
  fuel.kind = SeriesKind::FuelRatio;
  fuel.speed_kmh = 100.0;
  fuel.points = {{3, 0.1}, {4, 0.05}, {5, 1.0}, {6, 0.0}};
  try {
    series_fuel_to_drag(fuel, test::vehicle("hdt_mcauliffe"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
    CHECK(std::string(e.what()).find("point 2") != std::string::npos);
  }
}
