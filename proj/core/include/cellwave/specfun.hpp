#pragma once

#include <complex>
#include <vector>

namespace cellwave {

struct SeriesConfig {
    double truncation_tolerance = 1e-15;
    int max_terms = 200;

    void validate() const;
};

// Power series for J_m and I_m of integer order m >= 0.
double bessel_j(int m, double x, const SeriesConfig& cfg = {});
std::complex<double> bessel_j(int m, std::complex<double> z, const SeriesConfig& cfg = {});
double bessel_i(int m, double x, const SeriesConfig& cfg = {});
std::complex<double> bessel_i(int m, std::complex<double> z, const SeriesConfig& cfg = {});

double bessel_j_prime(int m, double x, const SeriesConfig& cfg = {});
std::complex<double> bessel_j_prime(int m, std::complex<double> z, const SeriesConfig& cfg = {});
double bessel_i_prime(int m, double x, const SeriesConfig& cfg = {});
std::complex<double> bessel_i_prime(int m, std::complex<double> z, const SeriesConfig& cfg = {});

struct RootScan {
    double start = 0.05;
    double step = 0.1;
    double limit = 60.0;       // last abscissa scanned before giving up
    double abs_tolerance = 1e-13;
};

// First `count` positive roots of J_m', strictly increasing.
std::vector<double> jprime_roots(int m, int count, const RootScan& scan = {});
// First `count` positive zeros of J_m, strictly increasing.
std::vector<double> j_roots(int m, int count, const RootScan& scan = {});

// |z I_{m+1}(z) I_m(conj z) - conj(z) I_{m+1}(conj z) I_m(z)
//   - (z^2 - conj(z)^2) * int_0^1 u I_m(uz) I_m(u conj z) du|
double bessel_relation_residual(int m, std::complex<double> z, int nodes = 96);

}  // namespace cellwave
