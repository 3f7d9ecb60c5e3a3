#include "platoon/measurement_csv.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include "platoon/error.hpp"
#include "platoon/records.hpp"

namespace platoon {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    out.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double cell_number(std::string_view cell, const std::string& where, const char* column) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
    fail(ErrorKind::Parse, where + ": column '" + column + "' is not a number: '" + std::string(cell) + "'");
  return v;
}

}  // namespace

MeasurementSeries parse_measurement_csv(std::string_view text, std::string_view origin) {
  MeasurementSeries s;
  bool have_header = false;
  bool with_source = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    const auto cells = split(line);
    if (!have_header) {
      std::size_t n = cells.size();
      with_source = n > 0 && cells.back() == "source";
      if (with_source) --n;
      if (n == 2 && cells[0] == "gap_m" && cells[1] == "ratio") {
        s.kind = SeriesKind::DragRatio;
      } else if (n == 3 && cells[0] == "gap_m" && cells[1] == "fuel_ratio" && cells[2] == "speed_kmh") {
        s.kind = SeriesKind::FuelRatio;
      } else {
        fail(ErrorKind::Parse, where + ": header must be 'gap_m,ratio' or 'gap_m,fuel_ratio,speed_kmh'"
                                       " (optionally followed by ',source')");
      }
      have_header = true;
      continue;
    }
    const std::size_t expected = (s.kind == SeriesKind::DragRatio ? 2 : 3) + (with_source ? 1 : 0);
    if (cells.size() != expected)
      fail(ErrorKind::Parse, where + ": expected " + std::to_string(expected) + " columns, got " +
                                 std::to_string(cells.size()));
    MeasurementPoint p;
    p.gap_m = cell_number(cells[0], where, "gap_m");
    p.value = cell_number(cells[1], where, s.kind == SeriesKind::DragRatio ? "ratio" : "fuel_ratio");
    if (s.kind == SeriesKind::FuelRatio) {
      const double v = cell_number(cells[2], where, "speed_kmh");
      if (s.speed_kmh && *s.speed_kmh != v)
        fail(ErrorKind::Parse, where + ": speed_kmh must be the same on every row");
      s.speed_kmh = v;
    }
    if (with_source && s.source.empty()) s.source = std::string(cells.back());
    if (!s.points.empty() && !(p.gap_m > s.points.back().gap_m))
      fail(ErrorKind::Parse, where + ": gap_m must be strictly increasing");
    s.points.push_back(p);
  }
  if (!have_header) fail(ErrorKind::Parse, std::string(origin) + ": empty file (no header)");
  if (s.points.empty()) fail(ErrorKind::Parse, std::string(origin) + ": no data rows");
  if (s.source.empty()) s.source = std::string(origin);
  return s;
}

MeasurementSeries read_measurement_csv(const std::filesystem::path& path) {
  return parse_measurement_csv(read_text_file(path), path.string());
}

std::string format_measurement_csv(const MeasurementSeries& s) {
  std::ostringstream os;
  const bool fuel = s.kind == SeriesKind::FuelRatio;
  os << (fuel ? "gap_m,fuel_ratio,speed_kmh,source\n" : "gap_m,ratio,source\n");
  std::string source = s.source;
  for (char& ch : source)
    if (ch == ',' || ch == '\n') ch = ';';
  for (const auto& p : s.points) {
    os << format_double(p.gap_m) << ',' << format_double(p.value);
    if (fuel) os << ',' << format_double(s.speed_kmh.value_or(0.0));
    os << ',' << source << '\n';
  }
  return os.str();
}

}  // namespace platoon
