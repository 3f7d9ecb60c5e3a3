#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "platoon/types.hpp"

namespace platoon {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Digests of the canonical serialized forms, so equal values hash equal
// regardless of how the source file was formatted.
std::string digest_of(const VehicleSpec& spec);
std::string digest_of(const DragModel& model);
std::string digest_of(const MeasurementSeries& series);

}  // namespace platoon
