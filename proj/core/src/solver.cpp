#include "cellwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

namespace cellwave {

std::string to_string(BranchNormalization n) {
    return n == BranchNormalization::fixed_p1 ? "fixed_p1" : "fixed_area";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ProfileOptions profile_options(const SolverOptions& opts, bool reconstruct) {
    ProfileOptions p = opts.profile;
    p.reconstruct = reconstruct;
    if (opts.normalization == BranchNormalization::fixed_area) p.require_pressure_bound = false;
    return p;
}

FixedSpeedSolution picard(const ModelParams& params, double V, const SolverOptions& opts,
                          double c_start) {
    const ProfileOptions quick = profile_options(opts, false);
    const bool accelerate = opts.c1_secant.value_or(opts.normalization == BranchNormalization::fixed_area);
    // With chi = 0 the shape ignores c1 and the update map is constant.
    double omega = params.chi == 0 ? 1.0 : opts.omega;
    bool fell_back = params.chi == 0;
    double c = c_start, prev_c = c_start;
    double prev_residual = kInf, prev_signed = kNaN;
    int stalled = 0;
    for (int it = 0;; ++it) {
        const ShapeProfile trial = build_profile(params, V, c, quick);
        const double target = c1_update(trial, params);
        const double signed_residual = target - c;
        const double residual = std::fabs(signed_residual);
        if (residual < opts.c1_tolerance * c)
            return {build_profile(params, V, c, profile_options(opts, true)), it, params.p1};
        if (it >= opts.max_iterations) break;
        if (residual >= prev_residual) {
            if (++stalled >= opts.fallback_after && !fell_back) {
                omega = opts.omega_fallback;
                fell_back = true;
            }
        } else {
            stalled = 0;
        }
        double next = (1 - omega) * c + omega * target;
        if (accelerate && std::isfinite(prev_signed) && signed_residual != prev_signed) {
            const double secant = c - signed_residual * (c - prev_c) / (signed_residual - prev_signed);
            if (secant > 0.5 * c && secant < 2.0 * c) next = secant;
        }
        prev_residual = residual;
        prev_signed = signed_residual;
        prev_c = c;
        c = next;
    }
    std::ostringstream os;
    os << "c1 fixed point did not converge in " << opts.max_iterations
       << " iterations at V = " << V << " (last iterates " << prev_c << ", " << c << ")";
    throw FixedPointDivergence(os.str(), prev_c, c);
}

FixedSpeedSolution fixed_area(const ModelParams& params, double V, const SolverOptions& opts,
                              double c_start, std::optional<double> p1_start) {
    const double target = std::numbers::pi * params.R0 * params.R0;
    const StationaryState st = stationary_state(params);
    double c_warm = c_start;
    auto run = [&](double p1, FixedSpeedSolution& out) {
        ModelParams q = params;
        q.p1 = p1;
        out = picard(q, V, opts, c_warm);
        c_warm = out.profile.c1;
        return std::log(profile_area(out.profile) / target);
    };

    FixedSpeedSolution sa, sb;
    double pa = p1_start.value_or(st.P_tilde);
    double ra = run(pa, sa);
    if (std::fabs(ra) < opts.area_tolerance) return sa;
    double pb = pa + 0.5 * ra * params.gamma / params.R0;
    double rb = kNaN;
    for (int tries = 0; tries < 20; ++tries) {
        try {
            rb = run(pb, sb);
            break;
        } catch (const Error&) {
            pb = 0.5 * (pa + pb);
        }
    }
    if (std::isnan(rb)) throw FixedPointDivergence("fixed-area secant: second iterate failed", pa, pb);

    for (int it = 0; it < opts.max_area_iterations; ++it) {
        if (std::fabs(rb) < opts.area_tolerance) return sb;
        double pc = pb - rb * (pb - pa) / (rb - ra);
        if (!std::isfinite(pc)) break;
        FixedSpeedSolution sc;
        double rc = kNaN;
        for (int tries = 0; tries < 20; ++tries) {
            try {
                rc = run(pc, sc);
                break;
            } catch (const Error&) {
                pc = 0.5 * (pb + pc);
            }
        }
        if (std::isnan(rc)) break;
        pa = pb;
        ra = rb;
        pb = pc;
        rb = rc;
        sb = std::move(sc);
    }
    std::ostringstream os;
    os << "fixed-area secant on p1 did not converge at V = " << V << " (last p1 " << pa << ", "
       << pb << ")";
    throw FixedPointDivergence(os.str(), pa, pb);
}

FixedSpeedSolution solve_at_speed(const ModelParams& params, double V, const SolverOptions& opts,
                                  std::optional<double> c1_start, std::optional<double> p1_start) {
    params.validate();
    if (!(V >= 0) || !std::isfinite(V)) throw InvalidParameters("speed V must be finite and >= 0");
    const double c0 = c1_start.value_or(stationary_state(params).c_tilde);
    if (opts.normalization == BranchNormalization::fixed_area)
        return fixed_area(params, V, opts, c0, p1_start);
    return picard(params, V, opts, c0);
}

struct SpeedSample {
    double V = 0;
    double G = kNaN;
    std::optional<FixedSpeedSolution> solution;
    std::string failure;
};

bool positive_side(double G) { return G > 0; }

WaveDiagnostics diagnose(const TravelingWave& w) {
    WaveDiagnostics d;
    const ShapeProfile& p = w.profile;
    d.G_residual = std::fabs(p.G_value);
    d.G_quadrature_error = p.G_error;
    d.closure_defect = w.closure_defect;
    d.curvature_residual = w.curvature_residual;
    d.mass_relative_error = std::fabs(w.mass_check - w.params.M) / w.params.M;
    d.com_error = std::hypot(w.com_velocity.x - w.V, w.com_velocity.y);
    d.convex = std::is_sorted(p.Y.begin(), p.Y.end());
    d.tip_curvature = tip_curvature(p);
    d.tip_curvature_expected = rhs_Y(0.0, w.params, w.V, p.c1);
    d.tip_curvature_error = std::fabs(d.tip_curvature - d.tip_curvature_expected);
    return d;
}

}  // namespace

bool WaveDiagnostics::passed() const {
    return G_residual < 1e-9 && closure_defect < 1e-6 && curvature_residual < 1e-8 &&
           mass_relative_error < 1e-8 && com_error < 1e-4 && convex && tip_curvature_error < 1e-8;
}

FixedSpeedSolution solve_fixed_V_detailed(const ModelParams& params, double V,
                                          const SolverOptions& opts,
                                          std::optional<double> c1_start) {
    return solve_at_speed(params, V, opts, c1_start, std::nullopt);
}

ShapeProfile solve_fixed_V(const ModelParams& params, double V, const SolverOptions& opts) {
    return solve_fixed_V_detailed(params, V, opts).profile;
}

TravelingWave solve_traveling_wave(const ModelParams& params, const SolverOptions& opts) {
    params.validate();
    if (opts.normalization == BranchNormalization::fixed_p1 &&
        !(params.p1 > params.chi * params.force.L())) {
        std::ostringstream os;
        os << "p1 = " << params.p1 << " must exceed chi L = " << params.chi * params.force.L();
        throw InvalidParameters(os.str());
    }

    const FixedSpeedSolution seed = solve_at_speed(params, 0.0, opts, std::nullopt, std::nullopt);
    ModelParams seed_params = params;
    seed_params.p1 = seed.p1;
    const double vmax = find_vmax(seed_params, seed.profile.c1, profile_options(opts, false));

    auto evaluate = [&](double V, const FixedSpeedSolution* warm) {
        SpeedSample s;
        s.V = V;
        try {
            const FixedSpeedSolution& base = warm ? *warm : seed;
            s.solution = solve_at_speed(params, V, opts, base.profile.c1, base.p1);
            s.G = s.solution->profile.G_value;
        } catch (const SpeedTooLarge&) {
            s.G = kInf;
        } catch (const Error& e) {
            s.G = kNaN;
            s.failure = e.what();
        }
        return s;
    };

    std::vector<double> speeds;
    for (int k = opts.scan_levels; k >= 1; --k) speeds.push_back(std::ldexp(vmax, -k));
    for (int k = 2; k <= opts.scan_levels; ++k) speeds.push_back(vmax * (1 - std::ldexp(1.0, -k)));

    std::vector<SpeedSample> samples;
    const FixedSpeedSolution* warm = &seed;
    for (double V : speeds) {
        samples.push_back(evaluate(V, warm));
        if (samples.back().solution) warm = &*samples.back().solution;
    }

    TravelingWave wave;
    for (const auto& s : samples) wave.scan.push_back({s.V, s.G});
    wave.V_max = vmax;

    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (!std::isnan(samples[i].G)) valid.push_back(i);
    for (std::size_t k = 0; k + 1 < valid.size(); ++k) {
        const auto& lo = samples[valid[k]];
        const auto& hi = samples[valid[k + 1]];
        if (positive_side(lo.G) != positive_side(hi.G)) wave.brackets.emplace_back(lo.V, hi.V);
    }

    if (wave.brackets.empty()) {
        std::ostringstream os;
        os << "no sign change of G on (0, V_max = " << vmax << ")";
        try {
            os << "; chi* = " << chi_star(params);
        } catch (const Error&) {
        }
        os << "; zero-speed branch point has c1 = " << seed.profile.c1 << ", radius "
           << seed.profile.xR << ", activity a chi c1 f'(c1) = "
           << params.a * params.chi * seed.profile.c1 * params.force.d1(seed.profile.c1);
        if (opts.normalization == BranchNormalization::fixed_p1) {
            if (auto chi_eff = effective_threshold(params))
                os << "; activity reaches 1 at chi = " << *chi_eff << " for p1 = " << params.p1;
        }
        throw NoTravelingWave(os.str(), wave.scan);
    }

    // Bisection on the smallest-V bracket, warm started from the nearer end.
    const double a0 = wave.brackets.front().first, b0 = wave.brackets.front().second;
    auto find = [&](double V) {
        for (auto& s : samples)
            if (s.V == V) return s;
        return SpeedSample{};
    };
    SpeedSample A = find(a0), B = find(b0);
    SpeedSample root = A;
    bool converged = false;
    int n = 0;
    for (; n < opts.max_bisections; ++n) {
        const double mid = 0.5 * (A.V + B.V);
        if (mid <= A.V || mid >= B.V) break;
        const FixedSpeedSolution* w = A.solution ? &*A.solution : (B.solution ? &*B.solution : nullptr);
        SpeedSample M = evaluate(mid, w);
        if (std::isnan(M.G)) {
            std::ostringstream os;
            os << "bisection failed at V = " << mid << ": " << M.failure;
            throw Error(os.str());
        }
        const bool small = std::fabs(M.G) < opts.G_tolerance;
        const bool narrow = (B.V - A.V) < opts.V_width_tolerance * vmax;
        if (M.solution && (std::fabs(M.G) < std::fabs(root.G) || !root.solution || small))
            root = M;
        if (small && narrow) {
            root = M;
            converged = true;
            ++n;
            break;
        }
        if (positive_side(M.G) == positive_side(A.G))
            A = std::move(M);
        else
            B = std::move(M);
    }
    if (!root.solution) throw Error("bisection produced no admissible profile");

    const FixedSpeedSolution& sol = *root.solution;
    wave.params = params;
    wave.params.p1 = sol.p1;
    wave.profile = sol.profile;
    wave.V = root.V;
    wave.c1_iterations = sol.iterations;
    wave.V_bisections = n;
    wave.bisection_converged = converged;
    wave.area = profile_area(wave.profile);
    wave.mass_check = wave.profile.c1 * 2 * weighted_height(wave.profile);
    wave.closure_defect = std::fabs(wave.profile.h_at(wave.profile.xR));
    wave.curvature_residual = curvature_residual(wave.profile, wave.params);

    const Polyline boundary = export_boundary(wave.profile, opts.boundary_resolution);
    std::vector<double> conc(boundary.size());
    for (std::size_t i = 0; i < boundary.size(); ++i)
        conc[i] = wave.profile.c1 * std::exp(-wave.params.a * wave.V * boundary[i].x);
    wave.com_velocity = com_velocity(boundary, conc, wave.params);
    wave.diagnostics = diagnose(wave);
    return wave;
}

std::vector<BranchRow> sweep_chi(const ModelParams& base, const std::vector<double>& chi_values,
                                 const SolverOptions& opts) {
    std::vector<double> chis = chi_values;
    std::sort(chis.begin(), chis.end());
    std::vector<std::future<BranchRow>> jobs;
    jobs.reserve(chis.size());
    for (double chi : chis) {
        jobs.push_back(std::async(std::launch::async, [base, chi, opts] {
            BranchRow row;
            row.chi = chi;
            ModelParams p = base;
            p.chi = chi;
            try {
                const TravelingWave w = solve_traveling_wave(p, opts);
                row.ok = true;
                row.V = w.V;
                row.xL = w.profile.xL;
                row.xR = w.profile.xR;
                row.area = w.area;
                row.c1 = w.profile.c1;
            } catch (const NoTravelingWave&) {
                row.error = "no_traveling_wave";
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            return row;
        }));
    }
    std::vector<BranchRow> rows;
    rows.reserve(jobs.size());
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

Polyline export_boundary(const ShapeProfile& profile, int resolution) {
    if (resolution < 8) throw InvalidParameters("export_boundary: resolution must be >= 8");
    Polyline out;
    out.reserve(static_cast<std::size_t>(resolution));
    for (int k = 0; k < resolution; ++k) {
        const double theta = 2 * std::numbers::pi * k / resolution;
        const double target = std::cos(theta);
        const double normal_y = std::sin(theta);
        double x;
        if (target >= 1) {
            x = profile.xR;
        } else if (target <= -1) {
            x = profile.xL;
        } else {
            double lo = profile.xL, hi = profile.xR;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                (profile.Y_at(mid) < target ? lo : hi) = mid;
            }
            x = 0.5 * (lo + hi);
        }
        const double h = profile.h_at(x);
        const double y = normal_y >= 0 ? h : -h;
        out.push_back({x, k == 0 ? 0.0 : y, target, normal_y});
    }
    return out;
}

Polyline export_boundary(const TravelingWave& wave, int resolution) {
    return export_boundary(wave.profile, resolution);
}

LimitDisk limit_disk(const ModelParams& params) {
    params.validate();
    if (!(params.p1 > params.chi * params.force.L()))
        throw InvalidParameters("limit_disk: p1 must exceed chi L");
    const double k = params.M / (std::numbers::pi * params.gamma * params.gamma);
    auto phi = [&](double c) {
        const double drive = params.p1 - params.chi * params.force.f(c);
        return c - k * drive * drive;
    };
    double lo = 0, hi = k * params.p1 * params.p1;
    for (int it = 0; it < 300 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) < 0 ? lo : hi) = mid;
    }
    LimitDisk d;
    d.c1 = 0.5 * (lo + hi);
    d.radius = params.gamma / (params.p1 - params.chi * params.force.f(d.c1));
    d.activity = params.a * params.chi * d.c1 * params.force.d1(d.c1);
    return d;
}

std::optional<double> effective_threshold(const ModelParams& params) {
    params.validate();
    const double top = params.p1 / params.force.L() * (1 - 1e-9);
    if (!(top > 0)) return std::nullopt;
    auto activity = [&](double chi) {
        ModelParams q = params;
        q.chi = chi;
        return limit_disk(q).activity - 1.0;
    };
    // Scan for the first crossing, then bisect.
    const int n = 200;
    double prev = 0;
    for (int i = 1; i <= n; ++i) {
        const double chi = top * i / n;
        const double val = activity(chi);
        if (val >= 0) {
            double lo = prev, hi = chi;
            for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (activity(mid) < 0 ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev = chi;
    }
    return std::nullopt;
}

}  // namespace cellwave
