#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <gtest/gtest.h>

#include "cellwave/errors.hpp"
#include "cellwave/profile.hpp"

using namespace cellwave;
using std::numbers::pi;

namespace {

ModelParams reference(double chi = 2.5, double p1 = 6) {
    ModelParams p;
    p.chi = chi;
    p.p1 = p1;
    return p;
}

// Closed-form tilt for the Hill force: the force term integrates to a logarithm.
struct HillOracle {
    ModelParams p;
    double V, c1;

    double k() const { return p.a * V; }
    double Y(double x) const {
        const double L = p.force.L(), al = p.force.alpha();
        double force_part;
        if (k() == 0) force_part = -p.chi * p.force.f(c1) * x;
        else force_part = p.chi * (L / k()) * std::log((al + c1 * std::exp(-k() * x)) / (al + c1));
        return (p.p1 * x - 0.5 * V * x * x + force_part) / p.gamma;
    }
    double dY(double x) const { return (p.p1 - V * x - p.chi * p.force.f(c1 * std::exp(-k() * x))) / p.gamma; }

    double solve(double target, double lo, double hi) const {
        boost::uintmax_t it = 300;
        auto r = boost::math::tools::toms748_solve([&](double x) { return Y(x) - target; }, lo, hi,
                                                   boost::math::tools::eps_tolerance<double>(52), it);
        return 0.5 * (r.first + r.second);
    }
    double xR() const { return solve(1.0, 0.0, p.p1 / V); }
    double xL() const {
        double lo = -1.0;
        while (Y(lo) > -1) lo *= 2;
        return solve(-1.0, lo, 0.0);
    }
    // Position with tilt sin(phi); phi in [-pi/2, pi/2].
    double x_of(double phi) const {
        const double s = std::sin(phi);
        if (s >= 1) return xR();
        if (s <= -1) return xL();
        return s > 0 ? solve(s, 0.0, xR()) : solve(s, xL(), 0.0);
    }
    // Integral over the boundary of w(x) Y / sqrt(1 - Y^2) dx, written in the
    // tilt angle so the integrand is smooth: dx = cos(phi) dphi / Y'.
    template <class W>
    double angle_integral(W&& w, double phi_hi = pi / 2) const {
        auto g = [&](double phi) {
            const double x = x_of(phi);
            return w(x) * std::sin(phi) / dY(x);
        };
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, -pi / 2, phi_hi, 12, 1e-13);
    }
};

}  // namespace

TEST(RhsY, Examples) {
    EXPECT_DOUBLE_EQ(rhs_Y(0.0, reference(), 0.7, 1.0), 3.5);
    for (double x : {-0.3, 0.0, 0.4}) EXPECT_DOUBLE_EQ(rhs_Y(x, reference(), 0.0, 1.0), 3.5);
    EXPECT_NEAR(rhs_Y(6.0 / 1.5, reference(0.0), 1.5, 1.0), 0.0, 1e-15);
    EXPECT_THROW(rhs_Y(-800.0, reference(), 1.0, 1.0), OutOfRange);
}

TEST(Tips, ZeroSpeedClosedForm) {
    const auto right = integrate_until_tip(reference(), 0.0, 1.0, Side::right);
    const auto left = integrate_until_tip(reference(), 0.0, 1.0, Side::left);
    EXPECT_NEAR(right.tip, 1 / 3.5, 1e-14);
    EXPECT_NEAR(left.tip, -1 / 3.5, 1e-14);
}

TEST(Tips, MatchClosedFormTiltAndBrackets) {
    const auto p = reference();
    for (double V : {1e-3, 0.3, 2.0, 7.5, 12.0}) {
        const HillOracle o{p, V, 1.0};
        const auto prof = build_profile(p, V, 1.0);
        EXPECT_NEAR(prof.xR, o.xR(), 1e-10) << V;
        EXPECT_NEAR(prof.xL, o.xL(), 1e-10) << V;
        for (std::size_t i = 0; i < prof.grid.size(); i += 7)
            EXPECT_NEAR(prof.Y[i], o.Y(prof.grid[i]), 1e-10) << "V=" << V << " x=" << prof.grid[i];
        EXPECT_NEAR(prof.Y.front(), -1.0, 1e-10);
        EXPECT_NEAR(prof.Y.back(), 1.0, 1e-10);
        EXPECT_NEAR(prof.Y_at(0.0), 0.0, 1e-12);

        const double d = p.p1 - p.force.L() * p.chi;
        EXPECT_LE(prof.xR, p.p1 / V);
        EXPECT_GT(prof.xL, (d - std::sqrt(d * d + 2 * p.gamma * V)) / V);
    }
}

TEST(Tips, PressureBoundIsEnforced) {
    EXPECT_THROW(integrate_until_tip(reference(2.5, 4.0), 0.1, 1.0, Side::left), InvalidParameters);
    EXPECT_THROW(find_vmax(reference(2.5, 5.0), 1.0), InvalidParameters);
}

TEST(Vmax, ZeroActivityClosedForm) {
    EXPECT_NEAR(find_vmax(reference(0.0), 3.7), 18.0, 18.0 * 1e-9);
    auto p = reference(0.0);
    p.gamma = 2;
    EXPECT_NEAR(find_vmax(p, 1.0), 9.0, 9.0 * 1e-9);
}

TEST(Vmax, WithinAnalyticBoundsAndSharp) {
    const auto p = reference();
    const double vmax = find_vmax(p, 1.0);
    EXPECT_GE(vmax, 0.5);
    EXPECT_LE(vmax, 18.0);
    EXPECT_NO_THROW(integrate_until_tip(p, 0.999 * vmax, 1.0, Side::right));
    EXPECT_THROW(integrate_until_tip(p, 1.001 * vmax, 1.0, Side::right), SpeedTooLarge);
    try {
        integrate_until_tip(p, 1.2 * vmax, 1.0, Side::right);
    } catch (const SpeedTooLarge& e) {
        EXPECT_DOUBLE_EQ(e.V, 1.2 * vmax);
    }
}

TEST(Closure, ZeroSpeedDisk) {
    const auto p = reference();
    const auto prof = build_profile(p, 0.0, 1.0);
    const double R = 1 / 3.5;
    EXPECT_NEAR(closure_G(prof), 0.0, 1e-8);
    double hmax = 0;
    for (std::size_t i = 0; i < prof.grid.size(); ++i) {
        const double x = prof.grid[i];
        EXPECT_NEAR(prof.h[i], std::sqrt(std::max(0.0, R * R - x * x)), 1e-9);
        hmax = std::max(hmax, prof.h[i]);
    }
    EXPECT_NEAR(hmax, R, 1e-6);
    EXPECT_NEAR(profile_area(prof), pi * R * R, 1e-10);
    EXPECT_LT(curvature_residual(prof, p), 1e-10);
}

TEST(Closure, MatchesAngleParametrizedOracle) {
    const auto p = reference();
    for (double V : {1e-3, 0.5, 3.0, 6.0, 10.0, 14.0}) {
        const HillOracle o{p, V, 1.0};
        const auto prof = build_profile(p, V, 1.0);
        const double G = o.angle_integral([](double) { return 1.0; });
        EXPECT_NEAR(prof.G_value, G, 1e-9 * std::max(1.0, std::fabs(G))) << V;
        EXPECT_LT(prof.G_error, 1e-8);

        const double xR = prof.xR, k = p.a * V;
        const double area = -2 * o.angle_integral([&](double x) { return xR - x; });
        EXPECT_NEAR(profile_area(prof), area, 1e-9) << V;
        const double weighted = -o.angle_integral([&](double x) { return -std::exp(-k * x) * std::expm1(-k * (xR - x)) / k; });
        EXPECT_NEAR(weighted_height(prof), weighted, 1e-9 * weighted) << V;
        const double x_mid = 0.5 * prof.xL;
        const double h_mid = -o.angle_integral([](double) { return 1.0; }, std::asin(o.Y(x_mid)));
        EXPECT_NEAR(prof.h_at(x_mid), h_mid, 1e-9) << V;
    }
}

TEST(Closure, SignStructureWithFrozenConcentration) {
    const auto p = reference();
    const double vmax = find_vmax(p, 1.0);
    EXPECT_LT(closure_G(build_profile(p, 1e-3, 1.0)), 0.0);
    EXPECT_LT(closure_G(build_profile(p, 5.0, 1.0)), 0.0);
    EXPECT_GT(closure_G(build_profile(p, 8.0, 1.0)), 0.0);
    double prev = -1;
    for (double frac : {0.9, 0.99, 0.999, 0.9999}) {
        const double G = closure_G(build_profile(p, frac * vmax, 1.0));
        EXPECT_GT(G, prev);
        prev = G;
    }
}

TEST(Closure, ContinuousInSpeed) {
    const auto p = reference();
    const double V = 4.0, G0 = closure_G(build_profile(p, V, 1.0));
    double prev = INFINITY;
    for (double eps = 1e-2; eps > 1e-5; eps /= 2) {
        const double d = std::fabs(closure_G(build_profile(p, V + eps, 1.0)) - G0);
        EXPECT_LT(d, prev);
        prev = d;
    }
    EXPECT_LT(prev, 1e-5);
}

TEST(Height, EndpointsAndPositivity) {
    const auto prof = build_profile(reference(), 3.0, 1.0);
    EXPECT_EQ(prof.h.front(), 0.0);
    EXPECT_EQ(prof.h_at(prof.xL), 0.0);
    EXPECT_NEAR(prof.h.back(), -prof.G_value, 1e-12);
    for (std::size_t i = 0; i + 1 < prof.h.size(); ++i) EXPECT_GE(prof.h[i], 0.0);
    const auto h = reconstruct_h(prof);
    ASSERT_EQ(h.size(), prof.grid.size());
    for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(h[i], prof.h[i], 1e-14);
}

TEST(Convexity, SlopeBoundsAlongProfile) {
    const auto p = reference();
    const double L = p.force.L(), d = p.p1 - L * p.chi;
    for (double V : {0.2, 4.0, 11.0}) {
        const auto prof = build_profile(p, V, 1.0);
        const double upper = L * p.chi + std::sqrt(d * d + 2 * V);
        for (std::size_t i = 0; i < prof.grid.size(); ++i) {
            const double x = prof.grid[i], s = p.gamma * prof.dY_at(x);
            EXPECT_GE(s, 0.0);
            EXPECT_LE(s, upper);
            if (x <= 0) {
                EXPECT_GE(prof.dY_at(x), d / p.gamma - 1e-12);
            }
            if (i > 0) {
                EXPECT_GE(prof.Y[i], prof.Y[i - 1]);
            }
        }
    }
}

// Y'' = V (a chi c f'(c) - 1), so Y' is non-increasing on [0, xR] whenever
// a chi s f'(s) <= 1, i.e. whenever the no-wave bound holds.
TEST(Convexity, RightSlopeIsMinimalWhenActivityBounded) {
    for (double chi : {0.5, 1.5, 1.99}) {
        const auto p = reference(chi);
        for (double c1 : {0.3, 1.0, 4.0}) {
            const double vmax = find_vmax(p, c1);
            for (double frac : {0.01, 0.3, 0.9}) {
                const auto prof = build_profile(p, frac * vmax, c1);
                const double right = prof.dY_at(prof.xR);
                for (double x : prof.grid)
                    if (x >= 0) {
                        EXPECT_GE(prof.dY_at(x), right - 1e-12) << chi << " " << c1 << " " << frac;
                    }
            }
        }
    }
}

// Above the threshold the same inequality can fail near x = 0; the closed-form
// tilt confirms the violation is not a discretization artifact.
TEST(Convexity, RightSlopeBoundCanFailAboveThreshold) {
    const auto p = reference();
    const HillOracle o{p, 0.2, 1.0};
    const double xR = o.xR();
    EXPECT_LT(o.dY(0.0), o.dY(xR));
    const auto prof = build_profile(p, 0.2, 1.0);
    EXPECT_NEAR(prof.dY_at(0.0), o.dY(0.0), 1e-9);
    EXPECT_NEAR(prof.dY_at(prof.xR), o.dY(xR), 1e-9);
}

TEST(ConcentrationUpdate, ZeroSpeedUsesDiskNormalization) {
    auto p = reference(2.5, 3.5);  // disk radius 1 at c1 = 1, below chi L
    ProfileOptions opts;
    opts.require_pressure_bound = false;
    const auto prof = build_profile(p, 0.0, 1.0, opts);
    EXPECT_NEAR(prof.xR, 1.0, 1e-14);
    EXPECT_NEAR(c1_update(prof, p), 1.0, 1e-12);
}

TEST(ConcentrationUpdate, LinearInMass) {
    auto p = reference();
    const auto prof = build_profile(p, 2.0, 1.0);
    const double c = c1_update(prof, p);
    p.M *= 2;
    EXPECT_NEAR(c1_update(prof, p), 2 * c, 1e-12 * c);
    EXPECT_THROW(c1_update_alternative(build_profile(p, 0.0, 1.0), p), InvalidParameters);
}

TEST(CurvatureResidual, OwnProfileAndPerturbation) {
    const auto p = reference();
    for (double V : {0.0, 0.5, 9.0}) {
        auto prof = build_profile(p, V, 1.0);
        EXPECT_LT(curvature_residual(prof, p), 1e-9) << V;
        prof.c1 *= 1.01;
        EXPECT_GT(curvature_residual(prof, p), 1e-4) << V;
    }
}

TEST(TipCurvature, EqualsSlopeAtOrigin) {
    const auto p = reference();
    EXPECT_NEAR(tip_curvature(build_profile(p, 0.0, 1.0)), 3.5, 1e-8);
    for (double V : {0.5, 4.0, 10.0}) {
        const auto prof = build_profile(p, V, 1.3);
        EXPECT_NEAR(tip_curvature(prof), (p.p1 - p.chi * p.force.f(1.3)) / p.gamma, 1e-8) << V;
    }
}

TEST(Profile, RejectsBadInputs) {
    EXPECT_THROW(build_profile(reference(), -1.0, 1.0), InvalidParameters);
    EXPECT_THROW(build_profile(reference(), 1.0, 0.0), InvalidParameters);
    EXPECT_THROW(build_profile(reference(), 30.0, 1.0), SpeedTooLarge);
}
