#include "platoon/records.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "platoon/error.hpp"

namespace platoon {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view text, std::string_view context) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    fail(ErrorKind::Parse, std::string(context) + ": not a number: '" + std::string(text) + "'");
  return v;
}

void reject_unknown(const Record& r, const std::set<std::string_view>& known) {
  for (const auto& [k, v] : r.fields)
    if (!known.count(k)) fail(ErrorKind::Parse, r.origin + ": unknown key '" + k + "' in [" + r.type + "]");
}

}  // namespace

const std::string* Record::find(std::string_view key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return &v;
  return nullptr;
}

const std::string& Record::require(std::string_view key) const {
  if (const auto* v = find(key)) return *v;
  fail(ErrorKind::Parse, origin + ": [" + type + "] is missing '" + std::string(key) + "'");
}

double Record::number(std::string_view key) const {
  return parse_number(require(key), origin + ": " + std::string(key));
}

std::optional<double> Record::optional_number(std::string_view key) const {
  const auto* v = find(key);
  if (!v || *v == "-") return std::nullopt;
  return parse_number(*v, origin + ": " + std::string(key));
}

std::vector<Record> parse_records(std::string_view text, std::string_view origin) {
  std::vector<Record> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail(ErrorKind::Parse, where + ": malformed record header");
      out.push_back(Record{std::string(trim(line.substr(1, line.size() - 2))), {}, where});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::Parse, where + ": expected 'key = value'");
    if (out.empty()) fail(ErrorKind::Parse, where + ": key before any [record] header");
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(ErrorKind::Parse, where + ": empty key");
    if (out.back().find(key)) fail(ErrorKind::Parse, where + ": duplicate key '" + key + "'");
    out.back().fields.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::string format_records(const std::vector<Record>& records) {
  std::ostringstream os;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i) os << '\n';
    os << '[' << records[i].type << "]\n";
    for (const auto& [k, v] : records[i].fields) os << k << " = " << v << '\n';
  }
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::vector<Record> read_records(const std::filesystem::path& path) {
  return parse_records(read_text_file(path), path.string());
}

VehicleSpec vehicle_from_record(const Record& r) {
  if (r.type != "vehicle") fail(ErrorKind::Parse, r.origin + ": expected [vehicle], got [" + r.type + "]");
  reject_unknown(r, {"name", "vehicle_class", "mass_kg", "length_m", "width_m", "height_m",
                     "frontal_area_m2", "cd_infinity", "driveline_efficiency", "alpha0", "alpha1",
                     "alpha2", "rolling_cr", "rolling_c1", "rolling_c2", "altitude_correction",
                     "payload_kg", "provenance"});
  VehicleSpec s;
  s.name = r.require("name");
  const auto cls = parse_vehicle_class(r.require("vehicle_class"));
  if (!cls) fail(ErrorKind::Parse, r.origin + ": vehicle_class must be LDV, Bus or HDT");
  s.vehicle_class = *cls;
  s.mass_kg = r.number("mass_kg");
  s.length_m = r.number("length_m");
  s.width_m = r.number("width_m");
  s.height_m = r.number("height_m");
  s.frontal_area_m2 = r.number("frontal_area_m2");
  s.cd_infinity = r.number("cd_infinity");
  s.driveline_efficiency = r.number("driveline_efficiency");
  s.alpha0 = r.number("alpha0");
  s.alpha1 = r.number("alpha1");
  s.alpha2 = r.number("alpha2");
  s.rolling_cr = r.number("rolling_cr");
  s.rolling_c1 = r.number("rolling_c1");
  s.rolling_c2 = r.number("rolling_c2");
  s.altitude_correction = r.optional_number("altitude_correction").value_or(1.0);
  s.payload_kg = r.optional_number("payload_kg").value_or(0.0);
  if (auto v = validate_spec(s); !v.empty()) fail(ErrorKind::InvalidProblem, r.origin + ": " + describe(v));
  return s;
}

Record to_record(const VehicleSpec& s) {
  Record r{"vehicle", {}, {}};
  auto put = [&](const char* k, double v) { r.fields.emplace_back(k, format_double(v)); };
  r.fields.emplace_back("name", s.name);
  r.fields.emplace_back("vehicle_class", std::string(to_string(s.vehicle_class)));
  put("mass_kg", s.mass_kg);
  put("length_m", s.length_m);
  put("width_m", s.width_m);
  put("height_m", s.height_m);
  put("frontal_area_m2", s.frontal_area_m2);
  put("cd_infinity", s.cd_infinity);
  put("driveline_efficiency", s.driveline_efficiency);
  put("alpha0", s.alpha0);
  put("alpha1", s.alpha1);
  put("alpha2", s.alpha2);
  put("rolling_cr", s.rolling_cr);
  put("rolling_c1", s.rolling_c1);
  put("rolling_c2", s.rolling_c2);
  put("altitude_correction", s.altitude_correction);
  put("payload_kg", s.payload_kg);
  return r;
}

DragModel model_from_record(const Record& r) {
  if (r.type != "drag_model") fail(ErrorKind::Parse, r.origin + ": expected [drag_model], got [" + r.type + "]");
  reject_unknown(r, {"id", "a", "b", "c", "g_o_m", "position", "platoon_size", "provenance"});
  DragModel m;
  if (const auto* id = r.find("id")) m.id = *id;
  m.a = r.number("a");
  m.b = r.number("b");
  m.c = r.number("c");
  m.g_o_m = r.optional_number("g_o_m");
  const auto pos = parse_position(r.require("position"));
  if (!pos) fail(ErrorKind::Parse, r.origin + ": position must be Lead, Middle or Trail");
  m.position = *pos;
  const double size = r.number("platoon_size");
  if (size != static_cast<int>(size)) fail(ErrorKind::Parse, r.origin + ": platoon_size must be an integer");
  m.platoon_size = static_cast<int>(size);
  if (auto v = validate_model(m); !v.empty()) fail(ErrorKind::InvalidProblem, r.origin + ": " + describe(v));
  return m;
}

Record to_record(const DragModel& m) {
  Record r{"drag_model", {}, {}};
  if (!m.id.empty()) r.fields.emplace_back("id", m.id);
  r.fields.emplace_back("a", format_double(m.a));
  r.fields.emplace_back("b", format_double(m.b));
  r.fields.emplace_back("c", format_double(m.c));
  r.fields.emplace_back("g_o_m", m.g_o_m ? format_double(*m.g_o_m) : std::string("-"));
  r.fields.emplace_back("position", std::string(to_string(m.position)));
  r.fields.emplace_back("platoon_size", std::to_string(m.platoon_size));
  return r;
}

std::vector<VehicleSpec> load_vehicles(const std::filesystem::path& path) {
  std::vector<VehicleSpec> out;
  for (const auto& r : read_records(path))
    if (r.type == "vehicle") out.push_back(vehicle_from_record(r));
  return out;
}

std::vector<DragModel> load_models(const std::filesystem::path& path) {
  std::vector<DragModel> out;
  for (const auto& r : read_records(path))
    if (r.type == "drag_model") out.push_back(model_from_record(r));
  return out;
}

namespace {

template <class T, class Key>
T pick(std::vector<T> all, std::string_view key, Key key_of, const std::filesystem::path& path,
       const char* what) {
  if (key.empty()) {
    if (all.size() == 1) return all.front();
    fail(ErrorKind::InvalidProblem, "'" + path.string() + "' holds " + std::to_string(all.size()) + " " + what +
                                        " records; select one by name");
  }
  for (auto& x : all)
    if (key_of(x) == key) return x;
  fail(ErrorKind::InvalidProblem, "no " + std::string(what) + " named '" + std::string(key) + "' in '" +
                                      path.string() + "'");
}

}  // namespace

VehicleSpec load_vehicle(const std::filesystem::path& path, std::string_view name) {
  return pick(load_vehicles(path), name, [](const VehicleSpec& s) { return s.name; }, path, "vehicle");
}

DragModel load_model(const std::filesystem::path& path, std::string_view id) {
  return pick(load_models(path), id, [](const DragModel& m) { return m.id; }, path, "drag_model");
}

}  // namespace platoon
