#pragma once

// Serialized outputs: fit reports, savings curves and run manifests. All
// documents are deterministic for identical inputs; only the manifest carries
// a timestamp.

#include <map>
#include <string>
#include <vector>

#include "platoon/analysis.hpp"
#include "platoon/fitter.hpp"
#include "platoon/types.hpp"

namespace platoon {

/// JSON report: parameters, RSS, iterations, convergence, active bounds,
/// warnings and the digest of the fitted series.
std::string fit_report_json(const FitResult& result, const MeasurementSeries& data);

/// Columns: x, one column per position (lead, middle_1.., trail), average.
std::string curve_csv(const SavingsCurve& curve);

/// Curve samples plus metadata: speed, abscissa, vehicle digest and one digest
/// per governing model.
std::string curve_json(const SavingsCurve& curve, const VehicleSpec& spec, const std::vector<DragModel>& models);

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::map<std::string, std::string> config;          // option -> value
  std::vector<std::string> outputs;
  std::string timestamp;  // ISO 8601, UTC
};

std::string manifest_json(const RunManifest& manifest);

}  // namespace platoon
