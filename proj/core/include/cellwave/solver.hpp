#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cellwave/errors.hpp"
#include "cellwave/model.hpp"
#include "cellwave/profile.hpp"

namespace cellwave {

// fixed_p1: p1 is an input. fixed_area: p1 is adjusted at every speed so
// that the enclosed area equals pi R0^2.
enum class BranchNormalization { fixed_p1, fixed_area };

std::string to_string(BranchNormalization n);

struct SolverOptions {
    ProfileOptions profile{};
    double omega = 0.5;
    double omega_fallback = 0.25;
    int fallback_after = 3;          // non-contracting steps before the fallback
    double c1_tolerance = 1e-11;     // relative
    int max_iterations = 200;
    // Secant steps on the c1 residual; defaults to on for fixed_area only.
    std::optional<bool> c1_secant;
    double G_tolerance = 1e-9;
    double V_width_tolerance = 1e-10;  // relative to V_max
    int scan_levels = 12;
    int max_bisections = 200;
    BranchNormalization normalization = BranchNormalization::fixed_p1;
    double area_tolerance = 1e-9;    // relative, fixed_area only
    int max_area_iterations = 60;
    int boundary_resolution = 4000;
};

struct FixedSpeedSolution {
    ShapeProfile profile;
    int iterations = 0;  // damped updates applied to c1
    double p1 = 0;       // differs from the input only for fixed_area
};

// Damped fixed point for c1 at a given speed.
FixedSpeedSolution solve_fixed_V_detailed(const ModelParams& params, double V,
                                          const SolverOptions& opts = {},
                                          std::optional<double> c1_start = std::nullopt);

ShapeProfile solve_fixed_V(const ModelParams& params, double V, const SolverOptions& opts = {});

struct WaveDiagnostics {
    double G_residual = 0;
    double G_quadrature_error = 0;
    double closure_defect = 0;
    double curvature_residual = 0;
    double mass_relative_error = 0;
    double com_error = 0;         // |com_velocity - (V, 0)|
    bool convex = false;
    double tip_curvature = 0;
    double tip_curvature_expected = 0;
    double tip_curvature_error = 0;

    bool passed() const;
};

struct TravelingWave {
    ModelParams params;  // p1 is the value used on the returned branch point
    ShapeProfile profile;
    double V = 0;
    double V_max = 0;
    double area = 0;
    double mass_check = 0;
    Vec2 com_velocity;
    double curvature_residual = 0;
    double closure_defect = 0;
    int c1_iterations = 0;
    int V_bisections = 0;
    bool bisection_converged = false;
    std::vector<ScanPoint> scan;
    std::vector<std::pair<double, double>> brackets;  // every sign change seen in the scan
    WaveDiagnostics diagnostics;
};

TravelingWave solve_traveling_wave(const ModelParams& params, const SolverOptions& opts = {});

struct BranchRow {
    double chi = 0;
    bool ok = false;
    double V = 0, xL = 0, xR = 0, area = 0, c1 = 0;
    std::string error;
};

// Independent solves per chi, run concurrently; rows are sorted by chi.
std::vector<BranchRow> sweep_chi(const ModelParams& base, const std::vector<double>& chi_values,
                                 const SolverOptions& opts = {});

// Counterclockwise closed boundary starting at (xR, 0), sampled uniformly in normal angle.
Polyline export_boundary(const ShapeProfile& profile, int resolution);
Polyline export_boundary(const TravelingWave& wave, int resolution);

// Self-consistent zero-speed disk at the given p1 (mass conserving).
struct LimitDisk {
    double c1 = 0;
    double radius = 0;
    double activity = 0;  // a chi c1 f'(c1)
};

LimitDisk limit_disk(const ModelParams& params);

// chi at which the zero-speed disk at fixed p1 has activity 1; empty if none below p1/L.
std::optional<double> effective_threshold(const ModelParams& params);

}  // namespace cellwave
