#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cellwave/bifurcation.hpp"
#include "cellwave/errors.hpp"

using namespace cellwave;
using std::numbers::pi;

namespace {

ModelParams hill(double L, double alpha) {
    ModelParams p;
    p.force = ActiveForce::hill(L, alpha);
    return p;
}

// Hill closed form: the bracket equals L alpha (c - 2 alpha) / (alpha + c)^4 with c = c~.
double hill_chi_pp(const ModelParams& p) {
    const double c = p.M / (pi * p.R0 * p.R0), L = p.force.L(), al = p.force.alpha();
    const double d1 = L * al / ((al + c) * (al + c));
    const double bracket = L * al * (c - 2 * al) / std::pow(al + c, 4);
    return -(p.a * p.M * p.R0 * p.R0) / (2 * d1 * d1) * bracket;
}

}  // namespace

TEST(SecondDerivative, ReferenceValue) {
    const auto p = hill(2, 1);
    EXPECT_NEAR(chi_second_derivative(p), pi / 4, 1e-10);
}

TEST(SecondDerivative, MatchesHillClosedForm) {
    for (double L : {0.5, 2.0, 7.0})
        for (double alpha : {0.2, 1.0, 3.0})
            for (double R0 : {0.5, 1.0, 2.0}) {
                auto p = hill(L, alpha);
                p.R0 = R0;
                p.a = 0.6;
                const double ref = hill_chi_pp(p);
                EXPECT_NEAR(chi_second_derivative(p), ref, 1e-12 * std::max(1.0, std::fabs(ref)));
            }
}

TEST(SecondDerivative, FiniteDifferenceCrossCheck) {
    for (double alpha : {0.3, 1.0, 2.5}) {
        const auto p = hill(2, alpha);
        const double exact = chi_second_derivative(p);
        EXPECT_NEAR(chi_second_derivative_fd(p), exact, 1e-6 * std::fabs(exact));
    }
}

TEST(SecondDerivative, IndependentOfActivityAndPressure) {
    auto p = hill(2, 1);
    const double base = chi_second_derivative(p);
    p.chi = 3.3;
    p.p1 = 9;
    EXPECT_EQ(chi_second_derivative(p), base);
}

TEST(Classification, Examples) {
    const auto r = classify_branch(hill(2, 1));
    EXPECT_EQ(r.classification, BranchKind::supercritical);
    EXPECT_NEAR(r.eta, pi / 8, 1e-10);
    EXPECT_NEAR(r.chi_star, 2.0, 1e-12);
    EXPECT_EQ(r.Vprime0, 1.0);
    EXPECT_EQ(to_string(r.classification), "supercritical");
}

TEST(Classification, VanishingBracketIsDegenerate) {
    // alpha = c~/2 makes (c~/2) f''' + f'' vanish for the Hill form.
    const auto r = classify_branch(hill(2, 0.5));
    EXPECT_EQ(r.classification, BranchKind::degenerate);
    EXPECT_NEAR(r.eta, 0.0, 1e-12);
}

TEST(Classification, BracketSignFlipsClassification) {
    EXPECT_EQ(classify_branch(hill(2, 0.25)).classification, BranchKind::subcritical);
    EXPECT_EQ(classify_branch(hill(2, 0.75)).classification, BranchKind::supercritical);
    for (double alpha : {0.1, 0.3, 0.45, 0.55, 0.8, 2.0}) {
        const auto r = classify_branch(hill(2, alpha));
        const bool positive_bracket = alpha < 0.5;
        EXPECT_EQ(r.classification, positive_bracket ? BranchKind::subcritical : BranchKind::supercritical);
    }
}

TEST(Classification, FlatForceRaises) {
    // f'(1) = 0 for f(s) = L (tanh((s-1)^3) + tanh 1) / (1 + tanh 1).
    const double L = 2, t1 = std::tanh(1.0), n = L / (1 + t1);
    auto q = [](double s) { return (s - 1) * (s - 1) * (s - 1); };
    ForceCallables fns{
        [=](double s) { return n * (std::tanh(q(s)) + t1); },
        [=](double s) { double th = std::tanh(q(s)); return n * (1 - th * th) * 3 * (s - 1) * (s - 1); },
        [=](double s) {
            double th = std::tanh(q(s)), sech2 = 1 - th * th, u = s - 1;
            return n * (sech2 * 6 * u - 2 * th * sech2 * 9 * u * u * u * u);
        },
        [=](double s) {
            double th = std::tanh(q(s)), sech2 = 1 - th * th, u = s - 1, qp = 3 * u * u;
            double dsech2 = -2 * th * sech2 * qp;
            double inner = 6 * u - 2 * th * qp * qp;
            double dinner = 6 - 2 * sech2 * qp * qp * qp - 2 * th * 2 * qp * 6 * u;
            return n * (dsech2 * inner + sech2 * dinner);
        }};
    ModelParams p;
    p.force = ActiveForce::from_callables(fns, L);
    EXPECT_THROW(chi_second_derivative(p), DegenerateForce);
    EXPECT_THROW(classify_branch(p), DegenerateForce);
}

TEST(Classification, InvalidParametersRaise) {
    auto p = hill(2, 1);
    p.M = 0;
    EXPECT_THROW(classify_branch(p), InvalidParameters);
}
