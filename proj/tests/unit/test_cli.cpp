#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "support.hpp"

#ifndef PLATOON_CLI_PATH
#error "PLATOON_CLI_PATH must name the CLI executable"
#endif

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Run cli(const std::string& args) {
  const auto out = test::scratch("cli.out"), err = test::scratch("cli.err");
  const std::string cmd = std::string(PLATOON_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::string fx(const char* name) { return test::fixture(name).string(); }

}  // namespace

TEST_CASE("cli fit writes a model close to the table row") {
  const auto model = test::scratch("fit_ldv2_trail.kv").string();
  const auto report = test::scratch("fit_ldv2_trail.json").string();
  const auto r = cli("fit --data " + fx("measurements/ldv2_trail.csv") + " --include-go --id ldv2_trail --out " +
                     model + " --report " + report);
  CHECK(r.code == 0);
  const auto m = platoon::load_model(model);
  CHECK(std::abs(*m.g_o_m - 55.72) <= 0.02 * 55.72);
  CHECK(std::abs(m.a - -1.7834) <= 0.02 * 1.7834);
  CHECK(slurp(report).find("\"residual_sum_squares\"") != std::string::npos);
}

TEST_CASE("cli fit on an empty file is a parse error") {
  const auto empty = test::scratch("empty.csv");
  std::ofstream(empty).close();
  const auto r = cli("fit --data " + empty.string());
  CHECK(r.code == 2);
  CHECK(r.err.rfind("platoon-error: parse: ", 0) == 0);
}

TEST_CASE("cli bounded truck fit pins the upper bound") {
  const auto report = test::scratch("hdt2.json").string();
  const auto r = cli("fit --data " + fx("measurements/hdt2_trail.csv") + " --spec " + fx("vehicles.kv") +
                     " --vehicle hdt_mcauliffe --go-bounds 250 320 --report " + report);
  CHECK(r.code == 0);
  CHECK(r.out.find("g_o_m = 320\n") != std::string::npos);
  CHECK(slurp(report).find("\"upper\"") != std::string::npos);
}

TEST_CASE("cli exit codes per error category") {
  CHECK(cli("fit --data " + fx("measurements/hdt2_trail.csv")).code == 3);  // fuel data without a spec
  auto r = cli("fit --data " + fx("measurements/ldv2_trail.csv") + " --go-bounds 60 50");
  CHECK(r.code == 3);
  CHECK(r.err.rfind("platoon-error: invalid_problem: ", 0) == 0);
  r = cli("fit --data " + fx("measurements/bus3_middle.csv") + " --max-iterations 1");
  CHECK(r.code == 4);
  CHECK(r.err.rfind("platoon-error: non_convergence: ", 0) == 0);
  CHECK(cli("fit").code == 1);
  CHECK(cli("reproduce nonsense").code == 1);
}

TEST_CASE("cli invert") {
  const auto zeros = test::scratch("zeros.csv");
  std::ofstream(zeros) << "gap_m,fuel_ratio,speed_kmh\n3,0,100\n4,0,100\n5,0,100\n6,0,100\n";
  auto r = cli("invert --data " + zeros.string() + " --spec " + fx("vehicles.kv") + " --vehicle hdt_mcauliffe");
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string row;
  std::getline(lines, row);
  CHECK(row == "gap_m,ratio,source");
  int rows = 0;
  while (std::getline(lines, row)) {
    const auto comma = row.find(',');
    CHECK(std::abs(std::stod(row.substr(comma + 1)) - 1.0) <= 1e-12);
    ++rows;
  }
  CHECK(rows == 4);

  const auto bad = test::scratch("bad_delta.csv");
  std::ofstream(bad) << "gap_m,fuel_ratio,speed_kmh\n3,0.1,100\n4,0.999,100\n5,0,100\n6,0,100\n";
  r = cli("invert --data " + bad.string() + " --spec " + fx("vehicles.kv") + " --vehicle hdt_mcauliffe");
  CHECK(r.code == 3);
  CHECK(r.err.find("point 1") != std::string::npos);
}

TEST_CASE("cli reproduce targets") {
  for (const char* t : {"table2", "headways", "savings_summary"}) {
    const auto r = cli(std::string("reproduce ") + t + " --fixtures " + PLATOON_FIXTURE_DIR);
    CAPTURE(r.out);
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
  }
}

TEST_CASE("cli reproduce reports mismatches with exit 5") {
  // A fixture directory whose LDV is longer than published.
  const auto dir = test::scratch("bad_fixtures");
  std::filesystem::create_directories(dir);
  std::filesystem::copy_file(fx("table2.kv"), dir / "table2.kv", std::filesystem::copy_options::overwrite_existing);
  std::string v = slurp(fx("vehicles.kv"));
  const auto at = v.find("length_m = 4.952");
  REQUIRE(at != std::string::npos);
  v.replace(at, 16, "length_m = 5.500");
  std::ofstream(dir / "vehicles.kv") << v;
  const auto r = cli("reproduce headways --fixtures " + dir.string());
  CHECK(r.code == 5);
  CHECK(r.out.find("FAIL  LDV headway") != std::string::npos);
  CHECK(r.err.rfind("platoon-error: reproduction_mismatch: ", 0) == 0);
}

TEST_CASE("cli curve output is deterministic") {
  const std::string args = "curve --spec " + fx("vehicles.kv") + " --vehicle bus_m --payload 0 --models " +
                           fx("table2.kv") + " --lead bus3_lead --middle bus3_middle --trail bus3_trail --size 3" +
                           " --abscissa time --range 0.1 5 --step 0.1";
  const auto a = cli(args);
  const auto b = cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("time_s,lead,middle_2,trail,average\n", 0) == 0);
  const auto j = cli(args + " --format json");
  CHECK(j.out.find("\"sha256\"") != std::string::npos);
}

TEST_CASE("cli manifest and config defaults") {
  const auto cfg = test::scratch("defaults.ini");
  std::ofstream(cfg) << "[headway]\nspec = \"" << fx("vehicles.kv") << "\"\nvehicle = \"hdt_vnl670\"\n";
  const auto manifest = test::scratch("manifest.json");
  const auto r = cli("--config " + cfg.string() + " --manifest " + manifest.string() + " headway");
  CHECK(r.code == 0);
  CHECK(r.out.find("1.317") != std::string::npos);
  const auto m = slurp(manifest);
  CHECK(m.find("\"timestamp\"") != std::string::npos);
  CHECK(m.find("vehicles.kv\": \"") != std::string::npos);
}
