#pragma once

// Measurement CSV files. Comma-separated, decimal point, header required:
//
//   gap_m,ratio[,source]                 drag-ratio series
//   gap_m,fuel_ratio,speed_kmh[,source]  fuel-ratio series (one speed per file)
//
// fuel_ratio is the fractional reduction (F∞ - F) / F∞. Lines starting with
// '#' are comments.

#include <filesystem>
#include <string>
#include <string_view>

#include "platoon/types.hpp"

namespace platoon {

MeasurementSeries parse_measurement_csv(std::string_view text, std::string_view origin);
MeasurementSeries read_measurement_csv(const std::filesystem::path& path);
std::string format_measurement_csv(const MeasurementSeries& series);

}  // namespace platoon
