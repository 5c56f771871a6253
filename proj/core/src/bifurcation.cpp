#include "cellwave/bifurcation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cellwave/errors.hpp"

namespace cellwave {

std::string to_string(BranchKind kind) {
    switch (kind) {
        case BranchKind::supercritical: return "supercritical";
        case BranchKind::subcritical: return "subcritical";
        case BranchKind::degenerate: return "degenerate";
    }
    return "unknown";
}

namespace {

struct Terms {
    double prefactor;  // -(a M R0^2) / (2 f'^2)
    double cubic;      // (M / (2 pi R0^2)) f'''
    double quadratic;  // f''
};

Terms terms_with(const ModelParams& params, double d2, double d3) {
    const double c = stationary_state(params).c_tilde;
    const double d1 = params.force.d1(c);
    if (!(d1 > 0)) {
        std::ostringstream os;
        os << "f'(c~) = " << d1 << " is not positive";
        throw DegenerateForce(os.str());
    }
    const double r2 = params.R0 * params.R0;
    return {-(params.a * params.M * r2) / (2 * d1 * d1),
            params.M / (2 * std::numbers::pi * r2) * d3, d2};
}

}  // namespace

double chi_second_derivative(const ModelParams& params) {
    const double c = stationary_state(params).c_tilde;
    const Terms t = terms_with(params, params.force.d2(c), params.force.d3(c));
    return t.prefactor * (t.cubic + t.quadratic);
}

double chi_second_derivative_fd(const ModelParams& params, double rel_step) {
    const double c = stationary_state(params).c_tilde;
    const double h = rel_step * c;
    const double up = params.force.d1(c + h);
    const double mid = params.force.d1(c);
    const double down = params.force.d1(c - h);
    const Terms t = terms_with(params, (up - down) / (2 * h), (up - 2 * mid + down) / (h * h));
    return t.prefactor * (t.cubic + t.quadratic);
}

BifurcationReport classify_branch(const ModelParams& params, double rel_tolerance) {
    const double c = stationary_state(params).c_tilde;
    const Terms t = terms_with(params, params.force.d2(c), params.force.d3(c));
    BifurcationReport r;
    r.chi_star = chi_star(params);
    r.chi_pp0 = t.prefactor * (t.cubic + t.quadratic);
    r.eta = r.chi_pp0 / 2;
    const double scale = std::fabs(t.prefactor) * (std::fabs(t.cubic) + std::fabs(t.quadratic)) / 2;
    const double tol = rel_tolerance * scale;
    if (r.eta > tol)
        r.classification = BranchKind::supercritical;
    else if (r.eta < -tol)
        r.classification = BranchKind::subcritical;
    else
        r.classification = BranchKind::degenerate;
    return r;
}

}  // namespace cellwave
