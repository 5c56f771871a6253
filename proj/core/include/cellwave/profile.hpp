#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "cellwave/model.hpp"
#include "cellwave/ode.hpp"

namespace cellwave {

struct ProfileOptions {
    OdeTolerance ode{};
    double layer_fraction = 1e-3;  // boundary-layer width relative to xR - xL
    int layer_nodes = 32;
    int panel_nodes = 16;
    // When false, p1 <= chi L is allowed and the tips only need to be reachable.
    bool require_pressure_bound = true;
    // When false, the height samples on the grid are not computed.
    bool reconstruct = true;
};

enum class Side { left, right };

// (p1 - V x - chi f(c1 exp(-a V x))) / gamma
double rhs_Y(double x, const ModelParams& params, double V, double c1);

struct TipSolution {
    double tip;
    DenseSolution solution;  // from x = 0 to the tip
};

TipSolution integrate_until_tip(const ModelParams& params, double V, double c1, Side side,
                                const ProfileOptions& opts = {});

// Supremum of speeds for which the right tip is reached.
double find_vmax(const ModelParams& params, double c1, const ProfileOptions& opts = {});

struct QuadratureValue {
    double value;
    double error_estimate;
};

class ShapeProfile {
public:
    double V = 0;
    double c1 = 0;
    double xL = 0;
    double xR = 0;
    std::vector<double> grid;
    std::vector<double> Y;
    std::vector<double> h;
    double G_value = 0;
    double G_error = 0;

    // Interpolated tilt and its derivative from the stored dense solution.
    double Y_at(double x) const;
    double dY_at(double x) const;
    // Half-height by singularity-aware quadrature from the left tip.
    double h_at(double x) const;
    // Integral over [xL, xR] of w(s) Y/sqrt(1 - Y^2) ds.
    QuadratureValue integrate_slope(const std::function<double(double)>& w) const;
    // Plain Gauss rule on [a, b]; only for subintervals away from the tips.
    double integrate_slope_between(double a, double b) const;

    const ModelParams& params() const;

    struct Core;

private:
    friend ShapeProfile build_profile(const ModelParams&, double, double, const ProfileOptions&);
    std::shared_ptr<const Core> core_;
};

// Integrates both halves, evaluates G and (optionally) h on the grid.
ShapeProfile build_profile(const ModelParams& params, double V, double c1,
                           const ProfileOptions& opts = {});

double closure_G(const ShapeProfile& profile);
std::vector<double> reconstruct_h(const ShapeProfile& profile);

// 2 * integral of h over [xL, xR].
double profile_area(const ShapeProfile& profile);
// Integral of exp(-a V x) h(x) over [xL, xR].
double weighted_height(const ShapeProfile& profile);

double c1_update(const ShapeProfile& profile, const ModelParams& params);
// -a V M / (2 * integral of exp(-a V x) Y/sqrt(1-Y^2)); requires V > 0.
double c1_update_alternative(const ShapeProfile& profile, const ModelParams& params);

double curvature_residual(const ShapeProfile& profile, const ModelParams& params);

// Curvature of the upper boundary at x = 0 from central differences of h.
double tip_curvature(const ShapeProfile& profile);

}  // namespace cellwave
