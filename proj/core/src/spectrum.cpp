#include "cellwave/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cellwave/diagnostics.hpp"
#include "cellwave/errors.hpp"
#include "cellwave/specfun.hpp"

namespace cellwave {

namespace {

double curvature_shift(const DispersionParams& dp) {
    const double m = dp.m;
    return dp.gamma * m * (m * m - 1) / (dp.R0 * dp.R0);
}

// Bisection to adjacent doubles; f(a) and f(b) have opposite signs.
template <class F>
double bracket_root(F&& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = f(mid);
        if (fm == 0) return mid;
        if ((fm < 0) == (fa < 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return std::fabs(f(a)) <= std::fabs(f(b)) ? a : b;
}

template <class F>
void scan_variable(F&& f, const std::vector<double>& grid, std::vector<double>& roots) {
    double x0 = grid.front(), f0 = f(x0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double x1 = grid[i];
        const double f1 = f(x1);
        if (f1 == 0) {
            roots.push_back(x1);
        } else if (f0 != 0 && (f0 < 0) != (f1 < 0)) {
            roots.push_back(bracket_root(f, x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
}

}  // namespace

void DispersionParams::validate() const {
    if (m < 0) throw InvalidParameters("dispersion: mode m must be >= 0");
    if (!(gamma > 0)) throw InvalidParameters("dispersion: gamma must be positive");
    if (!(R0 > 0)) throw InvalidParameters("dispersion: R0 must be positive");
    if (!(kappa_act >= 0) || !std::isfinite(kappa_act))
        throw InvalidParameters("dispersion: kappa_act must be finite and >= 0");
}

DispersionParams dispersion_params(const ModelParams& params, int m) {
    DispersionParams dp;
    dp.m = m;
    dp.gamma = params.gamma;
    dp.R0 = params.R0;
    dp.kappa_act = activity_ratio(params);
    dp.validate();
    return dp;
}

double eval_Hm(const DispersionParams& dp, double lambda) {
    dp.validate();
    const double g = curvature_shift(dp);
    const double k = dp.kappa_act / dp.R0 * dp.m;
    if (lambda > 0) {
        const double s = std::sqrt(lambda);
        const double z = -dp.R0 * s;
        return s * bessel_i_prime(dp.m, z) * (lambda + g) + k * lambda * bessel_i(dp.m, z);
    }
    if (lambda < 0) {
        const double mu = std::sqrt(-lambda);
        const double x = dp.R0 * mu;
        return mu * bessel_j_prime(dp.m, x) * (mu * mu - g) - k * mu * mu * bessel_j(dp.m, x);
    }
    return 0.0;
}

std::complex<double> eval_Hm(const DispersionParams& dp, std::complex<double> lambda) {
    dp.validate();
    const double g = curvature_shift(dp);
    const double k = dp.kappa_act / dp.R0 * dp.m;
    const std::complex<double> s = std::sqrt(lambda);
    const std::complex<double> z = -dp.R0 * s;
    return s * bessel_i_prime(dp.m, z) * (lambda + g) + k * lambda * bessel_i(dp.m, z);
}

SpectrumResult real_eigenvalues(const DispersionParams& dp, const SpectrumScan& scan) {
    dp.validate();
    if (!(scan.lo < scan.hi)) throw InvalidParameters("real_eigenvalues: empty search interval");
    SpectrumResult out;
    out.m = dp.m;
    out.kappa_act = dp.kappa_act;
    out.zero_multiplicity = dp.m == 0 ? 2 : (dp.m == 1 ? 1 : 0);

    const double s_min = std::sqrt(scan.exclusion);
    std::vector<double> found;

    if (scan.hi > scan.exclusion) {
        // lambda = s^2: geometric near zero, then uniform.
        std::vector<double> grid;
        const double s_max = std::sqrt(scan.hi);
        const double knee = std::min(0.1 / dp.R0, s_max);
        for (double s = s_min; s < knee; s *= 1.1) grid.push_back(s);
        const double step = 0.01 / dp.R0;
        for (double s = knee; s < s_max; s += step) grid.push_back(s);
        grid.push_back(s_max);
        std::vector<double> roots;
        scan_variable([&](double s) { return eval_Hm(dp, s * s); }, grid, roots);
        for (double s : roots) found.push_back(s * s);
    }
    if (scan.lo < -scan.exclusion) {
        // lambda = -mu^2: uniform in mu, finer than the Bessel zero spacing pi / R0.
        std::vector<double> grid;
        const double mu_max = std::sqrt(-scan.lo);
        const double step = std::min(std::numbers::pi * std::numbers::pi / (4 * dp.R0 * dp.R0),
                                     0.01 * std::numbers::pi / dp.R0);
        for (double mu = s_min; mu < mu_max; mu += step) grid.push_back(mu);
        grid.push_back(mu_max);
        std::vector<double> roots;
        scan_variable([&](double mu) { return eval_Hm(dp, -mu * mu); }, grid, roots);
        for (double mu : roots) found.push_back(-mu * mu);
    }

    std::vector<double> kept;
    for (double l : found)
        if (std::fabs(l) >= scan.exclusion && l >= scan.lo && l <= scan.hi) kept.push_back(l);
    std::sort(kept.begin(), kept.end(), std::greater<>());
    if (static_cast<int>(kept.size()) > scan.max_count) {
        kept.resize(static_cast<std::size_t>(scan.max_count));
        out.truncated = true;
    }
    out.eigenvalues = kept;
    for (double l : kept) out.residuals.push_back(std::fabs(eval_Hm(dp, l)));
    if (!kept.empty()) out.leading = kept.front();
    if (out.zero_multiplicity > 0) out.leading = std::max(out.leading.value_or(0.0), 0.0);
    return out;
}

double leading_eigenvalue_approx(const DispersionParams& dp) {
    dp.validate();
    if (dp.kappa_act >= 3) {
        std::ostringstream os;
        os << "small-lambda expansion invalid for kappa_act = " << dp.kappa_act << " >= 3";
        throw ExpansionInvalid(os.str());
    }
    if (std::fabs(dp.kappa_act - 1) >= 0.5) {
        std::ostringstream os;
        os << "leading eigenvalue expansion used far from kappa_act = 1 (kappa_act = "
           << dp.kappa_act << ")";
        warn(os.str());
    }
    return 8 * (dp.kappa_act - 1) / (dp.R0 * dp.R0 * (3 - dp.kappa_act));
}

std::vector<double> UncoupledSpectrum::all() const {
    std::vector<double> v = diffusion;
    v.push_back(curvature);
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

UncoupledSpectrum uncoupled_spectrum(int m, int p_count, double gamma, double R0) {
    if (m < 0) throw InvalidParameters("uncoupled_spectrum: m must be >= 0");
    if (!(gamma > 0) || !(R0 > 0)) throw InvalidParameters("uncoupled_spectrum: gamma, R0 > 0");
    UncoupledSpectrum u;
    u.curvature = -static_cast<double>(m) * (static_cast<double>(m) * m - 1);
    for (double r : jprime_roots(m, p_count)) u.diffusion.push_back(-r * r / (R0 * R0));
    return u;
}

EigenpairResidual eigenpair_residual(const DispersionParams& dp, double lambda_root) {
    dp.validate();
    if (lambda_root == 0) throw InvalidParameters("eigenpair_residual: lambda must be nonzero");
    using cd = std::complex<double>;
    const cd lam(lambda_root, 0.0);
    const cd s = std::sqrt(lam);
    const cd z = -dp.R0 * s;
    const cd I = bessel_i(dp.m, z);
    const cd Ip = bessel_i_prime(dp.m, z);
    const double g = curvature_shift(dp);
    const double k = dp.kappa_act / dp.R0 * dp.m;

    // Candidate (rho, c) from each relation; the better-conditioned one is used.
    const cd a0 = -k * I, a1 = lam + g;
    const cd b0 = s * Ip, b1 = lam;
    const double na = std::hypot(std::abs(a0), std::abs(a1));
    const double nb = std::hypot(std::abs(b0), std::abs(b1));
    const double scale = std::abs(lam) + std::fabs(g) + std::abs(k * I) + std::abs(s * Ip);

    EigenpairResidual r;
    cd v0, v1;
    if (na > 1e-14 * scale) {
        v0 = a0 / na;
        v1 = a1 / na;
    } else if (nb > 1e-14 * scale) {
        v0 = b0 / nb;
        v1 = b1 / nb;
    } else {
        r.degenerate = true;
        return r;
    }
    r.r1 = std::abs((lam + g) * v0 + k * I * v1);
    r.r2 = std::abs(s * Ip * v1 - lam * v0);
    return r;
}

int count_complex_roots(const DispersionParams& dp, std::complex<double> lower_left,
                        std::complex<double> upper_right, int samples_per_side) {
    dp.validate();
    const double x0 = lower_left.real(), y0 = lower_left.imag();
    const double x1 = upper_right.real(), y1 = upper_right.imag();
    if (!(x0 < x1) || !(y0 < y1)) throw InvalidParameters("count_complex_roots: empty rectangle");
    if (y0 <= 0 && y1 >= 0 && x0 <= 0)
        throw InvalidParameters("count_complex_roots: rectangle meets the branch cut (-inf, 0]");
    const std::complex<double> corners[5] = {
        {x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}};
    double total = 0;
    std::complex<double> prev = eval_Hm(dp, corners[0]);
    for (int side = 0; side < 4; ++side) {
        for (int i = 1; i <= samples_per_side; ++i) {
            const double t = static_cast<double>(i) / samples_per_side;
            const std::complex<double> p = corners[side] + t * (corners[side + 1] - corners[side]);
            const std::complex<double> v = eval_Hm(dp, p);
            total += std::arg(v / prev);
            prev = v;
        }
    }
    return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

}  // namespace cellwave
