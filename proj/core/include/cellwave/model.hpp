#pragma once

#include <numbers>
#include <optional>
#include <vector>

#include "cellwave/force.hpp"

namespace cellwave {

struct ModelParams {
    double gamma = 1.0;   // surface tension
    double chi = 0.0;     // activity
    double a = 1.0;       // adsorbed fraction
    double M = std::numbers::pi;  // total marker mass
    double R0 = 1.0;      // equivalent disk radius
    double p1 = 0.0;      // pressure constant of a traveling wave
    ActiveForce force = ActiveForce::hill(2.0, 1.0);

    // Throws InvalidParameters.
    void validate() const;
};

struct StationaryState {
    double c_tilde;
    double P_tilde;
};

StationaryState stationary_state(const ModelParams& params);

// 1 / (a c~ f'(c~)); throws DegenerateForce if f'(c~) <= 0.
double chi_star(const ModelParams& params);

// a chi c~ f'(c~), equal to chi / chi_star.
double activity_ratio(const ModelParams& params);

struct NonexistenceCertificate {
    bool holds = false;
    double sup_value = 0;   // sup of a chi s f'(s)
    double argmax = 0;
    bool analytic = false;
    bool argmax_on_boundary = false;
};

// s_max defaults to 100 c~.
NonexistenceCertificate nonexistence_certificate(const ModelParams& params,
                                                 std::optional<double> s_max = std::nullopt,
                                                 int grid = 2000);

struct Vec2 {
    double x = 0;
    double y = 0;
};

struct BoundaryPoint {
    double x, y;    // position
    double nx, ny;  // outward unit normal
};

using Polyline = std::vector<BoundaryPoint>;

// Signed area by the shoelace rule; positive for counterclockwise order.
double shoelace_area(const Polyline& boundary);

// -(chi / |Omega|) * closed integral of f(c) n ds, trapezoidal on the polyline.
Vec2 com_velocity(const Polyline& boundary, const std::vector<double>& concentration,
                  const ModelParams& params);

}  // namespace cellwave
