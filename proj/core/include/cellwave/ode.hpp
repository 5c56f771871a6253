#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cellwave/errors.hpp"

namespace cellwave {

// One accepted Dormand-Prince 5(4) step of a scalar ODE together with
// the coefficients of its fourth-order continuous extension.
struct DenseStep {
    double x0 = 0;
    double h = 0;
    double y0 = 0;
    double y1 = 0;
    double f0 = 0;  // y'(x0)
    double f1 = 0;  // y'(x0 + h)
    double r3 = 0, r4 = 0, r5 = 0;

    double x1() const { return x0 + h; }
    double value_at(double x) const;
    double derivative_at(double x) const;
};

// Piecewise continuous extension over consecutive steps taken in one direction.
class DenseSolution {
public:
    void append(const DenseStep& step) { steps_.push_back(step); }
    void replace_last(const DenseStep& step) { steps_.back() = step; }
    bool empty() const { return steps_.empty(); }
    const std::vector<DenseStep>& steps() const { return steps_; }
    const DenseStep& last() const { return steps_.back(); }

    double x_begin() const { return steps_.front().x0; }
    double x_end() const { return steps_.back().x1(); }
    bool covers(double x) const;

    double value(double x) const;
    double derivative(double x) const;

private:
    const DenseStep& locate(double x) const;
    std::vector<DenseStep> steps_;
};

struct OdeTolerance {
    double atol = 1e-12;
    double rtol = 1e-10;
    double h_init = 1e-3;
    double h_max = std::numeric_limits<double>::infinity();
    int max_steps = 100000;
};

namespace dp45 {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace dp45

// Single step from (x0, y0) with y'(x0) = f0; `err` receives the embedded error estimate.
template <class Rhs>
DenseStep dp45_step(Rhs&& f, double x0, double y0, double f0, double h, double* err = nullptr) {
    using namespace dp45;
    const double k1 = f0;
    const double k2 = f(x0 + c2 * h, y0 + h * a21 * k1);
    const double k3 = f(x0 + c3 * h, y0 + h * (a31 * k1 + a32 * k2));
    const double k4 = f(x0 + c4 * h, y0 + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = f(x0 + c5 * h, y0 + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double k6 =
        f(x0 + h, y0 + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const double y1 = y0 + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double k7 = f(x0 + h, y1);
    if (err) *err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    DenseStep s;
    s.x0 = x0;
    s.h = h;
    s.y0 = y0;
    s.y1 = y1;
    s.f0 = k1;
    s.f1 = k7;
    const double r2 = y1 - y0;
    s.r3 = h * k1 - r2;
    s.r4 = r2 - h * k7 - s.r3;
    s.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    return s;
}

enum class StepVerdict { proceed, stop };

// Adaptive integration from (x0, y0) in the direction of sign(direction).
// `monitor(step)` is called after every accepted step and may stop the march.
template <class Rhs, class Monitor>
DenseSolution integrate_dp45(Rhs&& f, double x0, double y0, double direction,
                             const OdeTolerance& tol, Monitor&& monitor) {
    DenseSolution sol;
    const double sgn = direction < 0 ? -1.0 : 1.0;
    double h = sgn * std::min(tol.h_init, tol.h_max);
    double x = x0, y = y0, fx = f(x0, y0);
    int rejected_in_row = 0;
    for (int n = 0; n < tol.max_steps;) {
        double err = 0;
        DenseStep step = dp45_step(f, x, y, fx, h, &err);
        const double scale = tol.atol + tol.rtol * std::max(std::fabs(y), std::fabs(step.y1));
        const double ratio = std::fabs(err) / scale;
        if (!std::isfinite(step.y1) || !std::isfinite(ratio)) {
            h *= 0.25;
            if (++rejected_in_row > 60) throw Error("integrate_dp45: non-finite step");
            continue;
        }
        if (ratio <= 1.0) {
            sol.append(step);
            ++n;
            rejected_in_row = 0;
            x = step.x1();
            y = step.y1;
            fx = step.f1;
            if (monitor(step) == StepVerdict::stop) return sol;
            const double grow = ratio == 0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
            h = sgn * std::min(std::fabs(h) * grow, tol.h_max);
        } else {
            h *= std::clamp(0.9 * std::pow(ratio, -0.2), 0.1, 0.9);
            if (++rejected_in_row > 60) throw Error("integrate_dp45: step size underflow");
        }
    }
    throw Error("integrate_dp45: step budget exhausted");
}

}  // namespace cellwave
