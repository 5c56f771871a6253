#include "cellwave/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cellwave/diagnostics.hpp"
#include "cellwave/errors.hpp"

namespace cellwave {

void ModelParams::validate() const {
    auto fail = [](const std::string& msg) { throw InvalidParameters(msg); };
    if (!(gamma > 0) || !std::isfinite(gamma)) fail("gamma must be positive");
    if (!(chi >= 0) || !std::isfinite(chi)) fail("chi must be nonnegative");
    if (!(a > 0 && a <= 1)) fail("a must lie in (0, 1]");
    if (!(M > 0) || !std::isfinite(M)) fail("M must be positive");
    if (!(R0 > 0) || !std::isfinite(R0)) fail("R0 must be positive");
    if (!std::isfinite(p1)) fail("p1 must be finite");
}

StationaryState stationary_state(const ModelParams& params) {
    params.validate();
    const double c = params.M / (std::numbers::pi * params.R0 * params.R0);
    return {c, params.gamma / params.R0 + params.chi * params.force.f(c)};
}

double chi_star(const ModelParams& params) {
    const double c = stationary_state(params).c_tilde;
    const double slope = params.force.d1(c);
    if (!(slope > 0)) {
        std::ostringstream os;
        os << "f'(c~) = " << slope << " is not positive at c~ = " << c;
        throw DegenerateForce(os.str());
    }
    return 1.0 / (params.a * c * slope);
}

double activity_ratio(const ModelParams& params) {
    const double c = stationary_state(params).c_tilde;
    return params.a * params.chi * c * params.force.d1(c);
}

NonexistenceCertificate nonexistence_certificate(const ModelParams& params,
                                                 std::optional<double> s_max, int grid) {
    const double c = stationary_state(params).c_tilde;
    const double top = s_max.value_or(100.0 * c);
    if (!(top > 0)) throw InvalidParameters("nonexistence_certificate: s_max must be positive");
    if (grid < 10) throw InvalidParameters("nonexistence_certificate: grid must be >= 10");
    const double k = params.a * params.chi;
    auto g = [&](double s) { return k * s * params.force.d1(s); };

    NonexistenceCertificate cert;
    if (params.force.kind() == ForceKind::hill) {
        const double alpha = params.force.alpha();
        cert.analytic = true;
        cert.argmax = std::min(alpha, top);
        cert.sup_value = g(cert.argmax);
        cert.argmax_on_boundary = alpha > top;
        if (cert.argmax_on_boundary) warn("nonexistence certificate: supremum at s_max boundary");
        cert.holds = cert.sup_value < 1.0;
        return cert;
    }

    // Log-spaced samples plus c~, then three rounds of tenfold refinement.
    std::vector<double> s;
    s.reserve(static_cast<std::size_t>(grid) + 2);
    const double lo = top * 1e-8;
    for (int i = 0; i < grid; ++i) s.push_back(lo * std::pow(top / lo, double(i) / (grid - 1)));
    if (c < top) s.push_back(c);
    std::sort(s.begin(), s.end());

    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (g(s[i]) > g(s[best])) best = i;
    double arg = s[best];
    double val = g(arg);
    double left = best > 0 ? s[best - 1] : s[best];
    double right = best + 1 < s.size() ? s[best + 1] : s[best];
    for (int round = 0; round < 3; ++round) {
        const int n = 21;
        double new_left = left, new_right = right;
        for (int i = 0; i < n; ++i) {
            const double x = left + (right - left) * i / (n - 1);
            const double v = g(x);
            if (v > val) {
                val = v;
                arg = x;
            }
        }
        const double width = (right - left) / (n - 1);
        new_left = std::max(s.front(), arg - width);
        new_right = std::min(s.back(), arg + width);
        left = new_left;
        right = new_right;
    }
    cert.sup_value = val;
    cert.argmax = arg;
    cert.argmax_on_boundary = arg >= s[s.size() - 2];
    if (cert.argmax_on_boundary) warn("nonexistence certificate: supremum at s_max boundary");
    cert.holds = val < 1.0;
    return cert;
}

double shoelace_area(const Polyline& boundary) {
    double twice = 0;
    const std::size_t n = boundary.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = boundary[i];
        const auto& q = boundary[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    return 0.5 * twice;
}

Vec2 com_velocity(const Polyline& boundary, const std::vector<double>& concentration,
                  const ModelParams& params) {
    if (boundary.size() != concentration.size())
        throw GeometryError("com_velocity: concentration size differs from boundary size");
    if (boundary.size() < 3) throw GeometryError("com_velocity: fewer than 3 vertices");
    const double area = shoelace_area(boundary);
    if (!(area > 0)) throw GeometryError("com_velocity: boundary area is not positive");
    if (params.chi == 0) return {0, 0};

    const std::size_t n = boundary.size();
    std::vector<double> fv(n);
    for (std::size_t i = 0; i < n; ++i) fv[i] = params.force.f(concentration[i]);
    Vec2 acc;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const auto& p = boundary[i];
        const auto& q = boundary[j];
        const double ds = std::hypot(q.x - p.x, q.y - p.y);
        acc.x += 0.5 * ds * (fv[i] * p.nx + fv[j] * q.nx);
        acc.y += 0.5 * ds * (fv[i] * p.ny + fv[j] * q.ny);
    }
    const double scale = -params.chi / area;
    return {scale * acc.x, scale * acc.y};
}

}  // namespace cellwave
