#include "cellwave/specfun.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cellwave/errors.hpp"
#include "cellwave/quadrature.hpp"

namespace cellwave {

namespace {

using ld = long double;
using cld = std::complex<long double>;

ld magnitude(ld v) { return std::fabs(v); }
ld magnitude(const cld& v) { return std::abs(v); }

// Sum_{p>=0} sign^p (z/2)^{2p+m} / (p! (m+p)!), terms built by ratio.
template <class T>
T power_series(int m, T half_z, int sign, const SeriesConfig& cfg, double report_x) {
    if (m < 0) {
        std::ostringstream os;
        os << "negative Bessel order " << m;
        throw EvaluationError(os.str(), m, report_x);
    }
    cfg.validate();
    T term = T(1);
    for (int k = 1; k <= m; ++k) term *= half_z / static_cast<ld>(k);
    if (magnitude(term) == 0) return T(0);

    const T q = static_cast<ld>(sign) * half_z * half_z;
    const ld qabs = magnitude(q);
    const ld tol = cfg.truncation_tolerance;
    const ld noise = std::numeric_limits<ld>::epsilon() * 1e-3L;
    T sum = term;
    ld largest = magnitude(term);
    for (int p = 0; p < cfg.max_terms; ++p) {
        const ld denom = static_cast<ld>(p + 1) * static_cast<ld>(m + p + 1);
        term *= q / denom;
        sum += term;
        const ld tabs = magnitude(term);
        if (tabs > largest) largest = tabs;
        if (denom > qabs && (tabs <= tol * magnitude(sum) || tabs <= noise * largest))
            return sum;
    }
    std::ostringstream os;
    os << "Bessel series of order " << m << " did not converge within " << cfg.max_terms
       << " terms at |z| = " << report_x;
    throw EvaluationError(os.str(), m, report_x);
}

template <class Eval>
double refine_bracket(Eval&& f, double a, double b, double fa, double tol) {
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (fa < 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    // Continue to adjacent doubles so |f| sits at the rounding floor.
    for (int i = 0; i < 64; ++i) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (fa < 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return std::fabs(f(a)) <= std::fabs(f(b)) ? a : b;
}

template <class Eval>
std::vector<double> scan_roots(Eval&& f, int count, const RootScan& scan, const char* name, int m) {
    if (count < 1) throw InvalidParameters(std::string(name) + ": count must be >= 1");
    if (m < 0) throw InvalidParameters(std::string(name) + ": order must be >= 0");
    if (!(scan.step > 0) || !(scan.start > 0))
        throw InvalidParameters(std::string(name) + ": scan start and step must be positive");
    std::vector<double> roots;
    roots.reserve(static_cast<std::size_t>(count));
    double x0 = scan.start;
    double f0 = f(x0);
    for (long k = 1; static_cast<int>(roots.size()) < count; ++k) {
        const double x1 = scan.start + static_cast<double>(k) * scan.step;
        if (x1 > scan.limit) {
            std::ostringstream os;
            os << name << "(" << m << ", " << count << "): scan exhausted at x = " << x0
               << " after " << roots.size() << " roots";
            throw RootSearchError(os.str(), x0);
        }
        const double f1 = f(x1);
        if (f0 == 0.0) {
            roots.push_back(x0);
        } else if ((f0 < 0) != (f1 < 0) && f1 != 0.0) {
            roots.push_back(refine_bracket(f, x0, x1, f0, scan.abs_tolerance));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

}  // namespace

void SeriesConfig::validate() const {
    if (!(truncation_tolerance > 0.0) || !(truncation_tolerance < 1.0))
        throw InvalidParameters("SeriesConfig: truncation_tolerance must lie in (0, 1)");
    if (max_terms < 30) throw InvalidParameters("SeriesConfig: max_terms must be >= 30");
}

double bessel_j(int m, double x, const SeriesConfig& cfg) {
    return static_cast<double>(power_series<ld>(m, static_cast<ld>(x) / 2, -1, cfg, x));
}

std::complex<double> bessel_j(int m, std::complex<double> z, const SeriesConfig& cfg) {
    const cld half = cld(z.real(), z.imag()) / 2.0L;
    const cld v = power_series<cld>(m, half, -1, cfg, std::abs(z));
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

double bessel_i(int m, double x, const SeriesConfig& cfg) {
    return static_cast<double>(power_series<ld>(m, static_cast<ld>(x) / 2, 1, cfg, x));
}

std::complex<double> bessel_i(int m, std::complex<double> z, const SeriesConfig& cfg) {
    const cld half = cld(z.real(), z.imag()) / 2.0L;
    const cld v = power_series<cld>(m, half, 1, cfg, std::abs(z));
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

double bessel_j_prime(int m, double x, const SeriesConfig& cfg) {
    if (m == 0) return -bessel_j(1, x, cfg);
    return 0.5 * (bessel_j(m - 1, x, cfg) - bessel_j(m + 1, x, cfg));
}

std::complex<double> bessel_j_prime(int m, std::complex<double> z, const SeriesConfig& cfg) {
    if (m == 0) return -bessel_j(1, z, cfg);
    return 0.5 * (bessel_j(m - 1, z, cfg) - bessel_j(m + 1, z, cfg));
}

double bessel_i_prime(int m, double x, const SeriesConfig& cfg) {
    if (m == 0) return bessel_i(1, x, cfg);
    return 0.5 * (bessel_i(m - 1, x, cfg) + bessel_i(m + 1, x, cfg));
}

std::complex<double> bessel_i_prime(int m, std::complex<double> z, const SeriesConfig& cfg) {
    if (m == 0) return bessel_i(1, z, cfg);
    return 0.5 * (bessel_i(m - 1, z, cfg) + bessel_i(m + 1, z, cfg));
}

std::vector<double> jprime_roots(int m, int count, const RootScan& scan) {
    return scan_roots([m](double x) { return bessel_j_prime(m, x); }, count, scan,
                      "jprime_roots", m);
}

std::vector<double> j_roots(int m, int count, const RootScan& scan) {
    return scan_roots([m](double x) { return bessel_j(m, x); }, count, scan, "j_roots", m);
}

double bessel_relation_residual(int m, std::complex<double> z, int nodes) {
    if (m < 0) throw InvalidParameters("bessel_relation_residual: order must be >= 0");
    if (nodes < 64) nodes = 64;
    const std::complex<double> zb = std::conj(z);
    const std::complex<double> lhs =
        z * bessel_i(m + 1, z) * bessel_i(m, zb) - zb * bessel_i(m + 1, zb) * bessel_i(m, z);

    const GaussLegendre& rule = gauss_legendre(nodes);
    std::complex<double> integral = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double u = 0.5 * (rule.nodes[k] + 1.0);
        integral += rule.weights[k] * u * bessel_i(m, u * z) * bessel_i(m, u * zb);
    }
    integral *= 0.5;
    return std::abs(lhs - (z * z - zb * zb) * integral);
}

}  // namespace cellwave
