#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cellwave/model.hpp"
#include "cellwave/solver.hpp"
#include "cellwave/spectrum.hpp"

namespace cellwave::cli {

enum ExitCode : int { ok = 0, negative_result = 1, usage_error = 2 };

// Everything a subcommand needs, after the config file and flag overrides are merged.
struct RunConfig {
    ModelParams params;
    std::optional<std::filesystem::path> out;
    std::vector<int> modes{0, 1, 2, 3};
    std::vector<double> chis;
    std::optional<double> kappa_act;
    SolverOptions solver;
    SpectrumScan scan;
    int trace_points = 801;
    bool json = false;
};

struct Overrides {
    std::optional<double> chi;
    std::optional<double> p1;
    std::optional<double> kappa_act;
    std::optional<std::vector<int>> modes;
    std::optional<std::vector<double>> chis;
    std::optional<std::string> out;
    bool fixed_area = false;
    bool json = false;
};

// Throws InvalidParameters on unknown keys, missing parameters or bad values.
RunConfig load_config(const std::string& json_text, const Overrides& overrides);

int cmd_threshold(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_tw(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bifurcate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full entry point: argument parsing, config loading, dispatch and exit-code mapping.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cellwave::cli
