#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cellwave/bifurcation.hpp"
#include "cellwave/model.hpp"
#include "cellwave/solver.hpp"
#include "cellwave/spectrum.hpp"

namespace cellwave {

using json = nlohmann::json;

// Accepts flat dotted keys ("force.kind", "force.L", ...) or a nested "force"
// object. Keys outside the parameter set are left to the caller.
ModelParams params_from_json(const json& doc);
json params_to_json(const ModelParams& params);

// Finite values as numbers; non-finite values as the strings "inf", "-inf", "nan".
json number(double v);

json to_json(const StationaryState& s);
json to_json(const NonexistenceCertificate& c);
json to_json(const WaveDiagnostics& d);
json to_json(const TravelingWave& w, bool include_grid = true);
json to_json(const std::vector<ScanPoint>& scan);
json to_json(const SpectrumResult& r);
json to_json(const BifurcationReport& r);

std::string format_number(double v);  // shortest round-trip text

std::string boundary_csv(const Polyline& boundary);
std::string branch_csv(const std::vector<BranchRow>& rows);
// lambda sampled uniformly on [lo, hi] (n points), lambda = 0 included when in range.
std::string dispersion_csv(const DispersionParams& dp, double lo, double hi, int n);
// Closed path in a 1000 x 1000 viewBox with a 5% margin.
std::string boundary_svg(const Polyline& boundary);

}  // namespace cellwave
