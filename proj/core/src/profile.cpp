#include "cellwave/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cellwave/errors.hpp"
#include "cellwave/quadrature.hpp"

namespace cellwave {

namespace {

constexpr double kExponentLimit = 700.0;

double checked_exp(double e, const char* where) {
    if (std::fabs(e) > kExponentLimit) {
        std::ostringstream os;
        os << where << ": exponent " << e << " exceeds +-" << kExponentLimit;
        throw OutOfRange(os.str());
    }
    return std::exp(e);
}

void check_inputs(const ModelParams& params, double V, double c1, const ProfileOptions& opts) {
    params.validate();
    if (!(V >= 0) || !std::isfinite(V)) throw InvalidParameters("speed V must be finite and >= 0");
    if (!(c1 > 0) || !std::isfinite(c1)) throw InvalidParameters("c1 must be positive");
    if (opts.require_pressure_bound && !(params.p1 > params.chi * params.force.L())) {
        std::ostringstream os;
        os << "p1 = " << params.p1 << " must exceed chi L = " << params.chi * params.force.L();
        throw InvalidParameters(os.str());
    }
}

// Radius of the disk with the same curvature as the profile at x = 0.
double initial_scale(const ModelParams& params, double V, double c1) {
    const double slope = rhs_Y(0.0, params, V, c1);
    if (!(slope > 0)) {
        std::ostringstream os;
        os << "tilt slope at x = 0 is " << slope << ", tips unreachable";
        throw ProfileInvalid(os.str());
    }
    return 1.0 / slope;
}

template <class G>
double bisect_sign(G&& g, double a, double b, int iters = 200) {
    double ga = g(a);
    for (int i = 0; i < iters; ++i) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double gm = g(m);
        if ((gm < 0) == (ga < 0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

struct Panel {
    enum Kind { left_layer, right_layer, smooth };
    double a, b;
    Kind kind;
};

struct Tilt {
    double Y, one_minus, one_plus;
};

struct Node {
    double x;
    double weighted_H;  // quadrature weight times Y / sqrt(1 - Y^2)
};

}  // namespace

double rhs_Y(double x, const ModelParams& params, double V, double c1) {
    const double drive = params.p1 - V * x;
    if (params.chi == 0) return drive / params.gamma;
    const double c = c1 * checked_exp(-params.a * V * x, "rhs_Y");
    return (drive - params.chi * params.force.f(c)) / params.gamma;
}

TipSolution integrate_until_tip(const ModelParams& params, double V, double c1, Side side,
                                const ProfileOptions& opts) {
    check_inputs(params, V, c1, opts);
    const double target = side == Side::right ? 1.0 : -1.0;
    const double scale = initial_scale(params, V, c1);
    auto f = [&](double x, double) { return rhs_Y(x, params, V, c1); };

    if (V == 0) {
        // Constant slope: Y is linear and the tip is closed form.
        const double tip = target * scale;
        const int n = 64;
        const double slope = 1.0 / scale;
        TipSolution out{tip, {}};
        double x = 0, y = 0;
        for (int k = 0; k < n; ++k) {
            const double next = k + 1 == n ? tip : tip * (k + 1) / n;
            DenseStep s = dp45_step(f, x, y, slope, next - x);
            out.solution.append(s);
            x = next;
            y = s.y1;
        }
        return out;
    }

    OdeTolerance tol = opts.ode;
    tol.h_max = std::min(tol.h_max, scale / 16);
    tol.h_init = std::min(tol.h_init, scale / 64);

    double search_end = 0;
    auto monitor = [&](const DenseStep& s) {
        if (target * (s.y1 - target) >= 0) {
            search_end = s.x1();
            return StepVerdict::stop;
        }
        if (s.f1 <= 0) {
            // Tilt turns back inside this step: check its extremum.
            const double xstar =
                s.f0 > 0 ? bisect_sign([&](double x) { return s.derivative_at(x); }, s.x0, s.x1())
                         : s.x0;
            if (target * (s.value_at(xstar) - target) >= 0) {
                search_end = xstar;
                return StepVerdict::stop;
            }
            std::ostringstream os;
            if (side == Side::right) {
                os << "tilt turns back at x = " << xstar << " with Y = " << s.value_at(xstar)
                   << " before reaching +1 (V = " << V << " at or above V_max)";
                throw SpeedTooLarge(os.str(), V);
            }
            os << "tilt turns back at x = " << xstar << " before reaching -1";
            throw ProfileInvalid(os.str());
        }
        return StepVerdict::proceed;
    };

    DenseSolution sol = integrate_dp45(f, 0.0, 0.0, target, tol, monitor);
    const DenseStep last = sol.last();
    double xt = bisect_sign([&](double x) { return last.value_at(x) - target; }, last.x0, search_end);

    // Redo the final step so that the tip is a knot, with Newton on the end value.
    DenseStep best = dp45_step(f, last.x0, last.y0, last.f0, xt - last.x0);
    for (int iter = 0; iter < 6; ++iter) {
        const double r = best.y1 - target;
        if (std::fabs(r) <= 1e-15 || best.f1 == 0) break;
        const double dx = -r / best.f1;
        if (std::fabs(dx) > std::fabs(last.h) * 0.5) break;
        const double trial_x = xt + dx;
        DenseStep trial = dp45_step(f, last.x0, last.y0, last.f0, trial_x - last.x0);
        if (std::fabs(trial.y1 - target) >= std::fabs(r)) break;
        xt = trial_x;
        best = trial;
    }
    sol.replace_last(best);
    return {xt, std::move(sol)};
}

double find_vmax(const ModelParams& params, double c1, const ProfileOptions& opts) {
    check_inputs(params, 0.0, c1, opts);
    const double hi0 = params.p1 * params.p1 / (2 * params.gamma);
    const double gap = params.p1 - params.force.L() * params.chi;
    double lo = gap > 0 ? gap * gap / (2 * params.gamma) : hi0 * 1e-12;
    double hi = hi0;
    auto reaches = [&](double V) {
        try {
            integrate_until_tip(params, V, c1, Side::right, opts);
            return true;
        } catch (const SpeedTooLarge&) {
            return false;
        }
    };
    if (lo >= hi * (1 - 1e-12)) return hi;
    if (reaches(hi * (1 + 1e-9))) {
        std::ostringstream os;
        os << "find_vmax: right tip reached above the analytic bound p1^2/(2 gamma) = " << hi;
        throw Error(os.str());
    }
    if (!reaches(lo)) {
        std::ostringstream os;
        os << "find_vmax: right tip not reached at the lower bound V = " << lo;
        throw Error(os.str());
    }
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (reaches(mid) ? lo : hi) = mid;
    }
    return lo;
}

struct ShapeProfile::Core {
    ModelParams params;
    double V = 0, c1 = 0, xL = 0, xR = 0;
    DenseSolution left, right;
    std::vector<double> zone_left, zone_right;  // breakpoints from each tip inward
    std::vector<double> cum_left, cum_right;    // integral of gamma*Y' from the tip
    std::vector<Panel> panels;
    std::vector<double> cum_H;                  // integral of H from xL to panels[j].a
    std::vector<Node> nodes_fine, nodes_coarse;
    int layer_nodes = 32, panel_nodes = 16;

    double slope(double x) const { return rhs_Y(x, params, V, c1); }

    double slope_integral(double a, double b) const {
        return integrate_gl([this](double s) { return slope(s); }, a, b, 16);
    }

    Tilt tilt(double x) const {
        x = std::clamp(x, xL, xR);
        if (x <= zone_left.back()) {
            auto it = std::lower_bound(zone_left.begin(), zone_left.end(), x);
            std::size_t j = static_cast<std::size_t>(it - zone_left.begin());
            if (j == 0) return {-1.0, 2.0, 0.0};
            const double op = cum_left[j - 1] + slope_integral(zone_left[j - 1], x);
            return {op - 1.0, 2.0 - op, op};
        }
        if (x >= zone_right.back()) {
            auto it = std::lower_bound(zone_right.begin(), zone_right.end(), x, std::greater<>());
            std::size_t j = static_cast<std::size_t>(it - zone_right.begin());
            if (j == 0) return {1.0, 0.0, 2.0};
            const double om = cum_right[j - 1] + slope_integral(x, zone_right[j - 1]);
            return {1.0 - om, om, 2.0 - om};
        }
        const double y = x <= 0 ? left.value(x) : right.value(x);
        return {y, 1.0 - y, 1.0 + y};
    }

    double H(double x) const {
        const Tilt t = tilt(x);
        if (!(t.one_minus > 0) || !(t.one_plus > 0)) {
            std::ostringstream os;
            os << "|Y| >= 1 inside the profile at x = " << x << " (Y = " << t.Y << ")";
            throw ProfileInvalid(os.str());
        }
        return t.Y / std::sqrt(t.one_minus * t.one_plus);
    }

    // Integral of H over [xL, x] for x inside the left layer.
    double left_layer_integral(double x, int n) const {
        const double top = std::sqrt(std::max(0.0, x - xL));
        if (top == 0) return 0;
        return integrate_gl([this](double u) { return 2 * u * H(xL + u * u); }, 0.0, top, n);
    }

    // Integral of H over [x, xR] for x inside the right layer.
    double right_layer_integral(double x, int n) const {
        const double top = std::sqrt(std::max(0.0, xR - x));
        if (top == 0) return 0;
        return integrate_gl([this](double u) { return 2 * u * H(xR - u * u); }, 0.0, top, n);
    }

    double partial(const Panel& p, double a, double b) const {
        switch (p.kind) {
            case Panel::left_layer:
                return left_layer_integral(b, layer_nodes) - left_layer_integral(a, layer_nodes);
            case Panel::right_layer:
                return right_layer_integral(a, layer_nodes) - right_layer_integral(b, layer_nodes);
            case Panel::smooth:
                break;
        }
        if (b <= a) return 0;
        return integrate_gl([this](double s) { return H(s); }, a, b, panel_nodes);
    }

    void append_nodes(std::vector<Node>& out, const Panel& p, int n_layer, int n_panel) const {
        if (p.kind == Panel::smooth) {
            const GaussLegendre& rule = gauss_legendre(n_panel);
            const double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double x = mid + half * rule.nodes[i];
                out.push_back({x, half * rule.weights[i] * H(x)});
            }
            return;
        }
        const GaussLegendre& rule = gauss_legendre(n_layer);
        const double top = std::sqrt(p.b - p.a);
        const double half = 0.5 * top;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double u = half * (rule.nodes[i] + 1.0);
            const double x = p.kind == Panel::left_layer ? xL + u * u : xR - u * u;
            out.push_back({x, half * rule.weights[i] * 2 * u * H(x)});
        }
    }
};

namespace {

// Breakpoints tip, tip +- d, tip +- 2d, tip +- 4d, ... up to tip +- zone.
std::vector<double> graded_zone(double tip, double dir, double d, double zone) {
    std::vector<double> pts{tip};
    double off = d;
    while (off < zone) {
        pts.push_back(tip + dir * off);
        off *= 2;
    }
    const double last_off = std::fabs(pts.back() - tip);
    const double prev_off = pts.size() > 2 ? std::fabs(pts[pts.size() - 2] - tip) : 0.0;
    if (pts.size() > 2 && zone - last_off < 0.5 * (last_off - prev_off)) pts.pop_back();
    pts.push_back(tip + dir * zone);
    return pts;
}

}  // namespace

ShapeProfile build_profile(const ModelParams& params, double V, double c1,
                           const ProfileOptions& opts) {
    TipSolution left = integrate_until_tip(params, V, c1, Side::left, opts);
    TipSolution right = integrate_until_tip(params, V, c1, Side::right, opts);

    auto core = std::make_shared<ShapeProfile::Core>();
    core->params = params;
    core->V = V;
    core->c1 = c1;
    core->xL = left.tip;
    core->xR = right.tip;
    core->left = std::move(left.solution);
    core->right = std::move(right.solution);
    core->layer_nodes = opts.layer_nodes;
    core->panel_nodes = opts.panel_nodes;

    const double xL = core->xL, xR = core->xR;
    const double width = xR - xL;
    const double delta = opts.layer_fraction * width;
    const double zone_l = 0.5 * -xL, zone_r = 0.5 * xR;
    const double d_l = std::min(delta, 0.25 * zone_l), d_r = std::min(delta, 0.25 * zone_r);

    core->zone_left = graded_zone(xL, 1.0, d_l, zone_l);
    {
        auto& z = core->zone_right;
        z = graded_zone(xR, -1.0, d_r, zone_r);
    }
    core->cum_left.assign(1, 0.0);
    for (std::size_t j = 1; j < core->zone_left.size(); ++j)
        core->cum_left.push_back(core->cum_left.back() +
                                 core->slope_integral(core->zone_left[j - 1], core->zone_left[j]));
    core->cum_right.assign(1, 0.0);
    for (std::size_t j = 1; j < core->zone_right.size(); ++j)
        core->cum_right.push_back(core->cum_right.back() + core->slope_integral(
                                                               core->zone_right[j], core->zone_right[j - 1]));

    auto& panels = core->panels;
    for (std::size_t j = 1; j < core->zone_left.size(); ++j)
        panels.push_back({core->zone_left[j - 1], core->zone_left[j],
                          j == 1 ? Panel::left_layer : Panel::smooth});
    const double max_width = width / 16;
    auto split = [&](double a, double b) {
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
        for (int k = 0; k < n; ++k)
            panels.push_back({a + (b - a) * k / n, k + 1 == n ? b : a + (b - a) * (k + 1) / n,
                              Panel::smooth});
    };
    split(core->zone_left.back(), 0.0);
    split(0.0, core->zone_right.back());
    for (std::size_t j = core->zone_right.size() - 1; j >= 1; --j)
        panels.push_back({core->zone_right[j], core->zone_right[j - 1],
                          j == 1 ? Panel::right_layer : Panel::smooth});

    const int coarse_layer = std::max(2, opts.layer_nodes * 3 / 4);
    const int coarse_panel = std::max(2, opts.panel_nodes * 3 / 4);
    core->cum_H.assign(1, 0.0);
    for (const Panel& p : panels) {
        const std::size_t before = core->nodes_fine.size();
        core->append_nodes(core->nodes_fine, p, opts.layer_nodes, opts.panel_nodes);
        double s = 0;
        for (std::size_t i = before; i < core->nodes_fine.size(); ++i) s += core->nodes_fine[i].weighted_H;
        core->cum_H.push_back(core->cum_H.back() + s);
        core->append_nodes(core->nodes_coarse, p, coarse_layer, coarse_panel);
    }

    ShapeProfile out;
    out.core_ = core;
    out.V = V;
    out.c1 = c1;
    out.xL = xL;
    out.xR = xR;

    const auto& ls = core->left.steps();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
        out.grid.push_back(it->x1());
        out.Y.push_back(it->y1);
    }
    out.grid.push_back(0.0);
    out.Y.push_back(0.0);
    for (const auto& s : core->right.steps()) {
        out.grid.push_back(s.x1());
        out.Y.push_back(s.y1);
    }

    const QuadratureValue G = out.integrate_slope([](double) { return 1.0; });
    out.G_value = G.value;
    out.G_error = G.error_estimate;
    if (opts.reconstruct) out.h = reconstruct_h(out);
    return out;
}

const ModelParams& ShapeProfile::params() const { return core_->params; }

double ShapeProfile::Y_at(double x) const {
    x = std::clamp(x, xL, xR);
    return x <= 0 ? core_->left.value(x) : core_->right.value(x);
}

double ShapeProfile::dY_at(double x) const {
    x = std::clamp(x, xL, xR);
    return x <= 0 ? core_->left.derivative(x) : core_->right.derivative(x);
}

double ShapeProfile::h_at(double x) const {
    const Core& c = *core_;
    x = std::clamp(x, c.xL, c.xR);
    if (x == c.xL) return 0.0;
    auto it = std::upper_bound(c.panels.begin(), c.panels.end(), x,
                               [](double v, const Panel& p) { return v < p.a; });
    std::size_t j = static_cast<std::size_t>(it - c.panels.begin());
    j = j == 0 ? 0 : j - 1;
    const Panel& p = c.panels[j];
    return -(c.cum_H[j] + c.partial(p, p.a, x));
}

double ShapeProfile::integrate_slope_between(double a, double b) const {
    return integrate_gl([this](double s) { return core_->H(s); }, a, b, core_->panel_nodes);
}

QuadratureValue ShapeProfile::integrate_slope(const std::function<double(double)>& w) const {
    double fine = 0, coarse = 0;
    for (const Node& n : core_->nodes_fine) fine += w(n.x) * n.weighted_H;
    for (const Node& n : core_->nodes_coarse) coarse += w(n.x) * n.weighted_H;
    return {fine, std::fabs(fine - coarse)};
}

double closure_G(const ShapeProfile& profile) {
    return profile.integrate_slope([](double) { return 1.0; }).value;
}

std::vector<double> reconstruct_h(const ShapeProfile& profile) {
    std::vector<double> h(profile.grid.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = profile.h_at(profile.grid[i]);
    if (!h.empty()) h.front() = 0.0;
    return h;
}

double profile_area(const ShapeProfile& profile) {
    const double xR = profile.xR;
    return -2.0 * profile.integrate_slope([xR](double s) { return xR - s; }).value;
}

double weighted_height(const ShapeProfile& profile) {
    const double k = profile.params().a * profile.V;
    const double xR = profile.xR;
    if (k == 0) return -profile.integrate_slope([xR](double s) { return xR - s; }).value;
    return -profile
                .integrate_slope([k, xR](double s) {
                    return checked_exp(-k * s, "weighted_height") * -std::expm1(-k * (xR - s)) / k;
                })
                .value;
}

double c1_update(const ShapeProfile& profile, const ModelParams& params) {
    if (profile.V == 0) return params.M / (std::numbers::pi * profile.xR * profile.xR);
    const double D = weighted_height(profile);
    if (!(D > 0)) {
        std::ostringstream os;
        os << "c1_update: weighted height integral " << D << " is not positive";
        throw ProfileInvalid(os.str());
    }
    return params.M / (2 * D);
}

double c1_update_alternative(const ShapeProfile& profile, const ModelParams& params) {
    const double k = params.a * profile.V;
    if (!(k > 0)) throw InvalidParameters("c1_update_alternative requires V > 0");
    const double I =
        profile.integrate_slope([k](double s) { return checked_exp(-k * s, "c1_update_alternative"); })
            .value;
    if (!(I < 0)) throw ProfileInvalid("c1_update_alternative: integral is not negative");
    return -k * params.M / (2 * I);
}

double curvature_residual(const ShapeProfile& profile, const ModelParams& params) {
    double worst = 0;
    for (double x : profile.grid) {
        const double r = params.gamma * (profile.dY_at(x) - rhs_Y(x, params, profile.V, profile.c1));
        worst = std::max(worst, std::fabs(r));
    }
    return worst;
}

double tip_curvature(const ShapeProfile& profile) {
    // h(eps) - h(0) and h(-eps) - h(0) come from short local integrals, so the
    // second difference does not inherit the cumulative quadrature error.
    auto second_and_first = [&](double eps) {
        const double up = profile.integrate_slope_between(0.0, eps);
        const double down = profile.integrate_slope_between(-eps, 0.0);
        return std::pair{(down - up) / (eps * eps), -(up + down) / (2 * eps)};
    };
    const double eps = 2e-3 * std::min(-profile.xL, profile.xR);
    const auto [d2a, d1a] = second_and_first(eps);
    const auto [d2b, d1b] = second_and_first(0.5 * eps);
    const double d2 = (4 * d2b - d2a) / 3;
    const double d1 = (4 * d1b - d1a) / 3;
    return -d2 / std::pow(1 + d1 * d1, 1.5);
}

}  // namespace cellwave
