#pragma once

// Key-value record files.
//
//   # comment
//   [vehicle]
//   name = ldv_a
//   mass_kg = 1469
//
// A file holds one or more records; each starts with a `[type]` header and
// continues with `key = value` lines. Blank lines and `#` comments are
// ignored. Known record types are `vehicle` and `drag_model`; other types are
// kept as generic records (the fixtures use `fit_case`).

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "platoon/types.hpp"

namespace platoon {

struct Record {
  std::string type;
  std::vector<std::pair<std::string, std::string>> fields;
  std::string origin;  // "file:line" of the header

  const std::string* find(std::string_view key) const;
  const std::string& require(std::string_view key) const;
  double number(std::string_view key) const;
  std::optional<double> optional_number(std::string_view key) const;
};

std::vector<Record> parse_records(std::string_view text, std::string_view origin);
std::vector<Record> read_records(const std::filesystem::path& path);
std::string format_records(const std::vector<Record>& records);

VehicleSpec vehicle_from_record(const Record& r);
Record to_record(const VehicleSpec& spec);
DragModel model_from_record(const Record& r);
Record to_record(const DragModel& model);

std::vector<VehicleSpec> load_vehicles(const std::filesystem::path& path);
std::vector<DragModel> load_models(const std::filesystem::path& path);
// Selects by name/id; an empty key returns the only record, or fails if
// there is more than one.
VehicleSpec load_vehicle(const std::filesystem::path& path, std::string_view name = {});
DragModel load_model(const std::filesystem::path& path, std::string_view id = {});

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace platoon
