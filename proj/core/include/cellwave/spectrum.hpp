#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "cellwave/model.hpp"

namespace cellwave {

struct DispersionParams {
    int m = 0;
    double gamma = 1.0;
    double R0 = 1.0;
    double kappa_act = 0.0;  // a chi c~ f'(c~) = chi / chi*

    void validate() const;
};

DispersionParams dispersion_params(const ModelParams& params, int m);

// Real representative of H_m on the real axis. For lambda < 0 the value is
// i^m H_m(lambda) = mu J_m'(R0 mu)(mu^2 - g_m) - (kappa/R0) m mu^2 J_m(R0 mu), mu^2 = -lambda.
double eval_Hm(const DispersionParams& dp, double lambda);

// H_m at complex lambda on the principal branch of sqrt(lambda).
std::complex<double> eval_Hm(const DispersionParams& dp, std::complex<double> lambda);

struct SpectrumResult {
    int m = 0;
    double kappa_act = 0;
    std::vector<double> eigenvalues;  // descending
    std::vector<double> residuals;    // |H_m| at each eigenvalue
    std::optional<double> leading;    // includes lambda = 0 when zero_multiplicity > 0
    int zero_multiplicity = 0;
    bool truncated = false;
};

struct SpectrumScan {
    double lo = -200.0;
    double hi = 200.0;
    int max_count = 64;
    double exclusion = 1e-8;  // |lambda| below this is never reported
};

SpectrumResult real_eigenvalues(const DispersionParams& dp, const SpectrumScan& scan = {});

// 8 (kappa - 1) / (R0^2 (3 - kappa)); warns when |kappa - 1| >= 0.5.
double leading_eigenvalue_approx(const DispersionParams& dp);

struct UncoupledSpectrum {
    double curvature = 0;           // -m (m^2 - 1)
    std::vector<double> diffusion;  // -lambda_{m,p}^2 / R0^2

    std::vector<double> all() const;
};

UncoupledSpectrum uncoupled_spectrum(int m, int p_count, double gamma, double R0);

struct EigenpairResidual {
    double r1 = 0;  // (lambda + g_m) rho + (kappa/R0) m I_m c
    double r2 = 0;  // sqrt(lambda) I_m' c - lambda rho
    bool degenerate = false;
};

EigenpairResidual eigenpair_residual(const DispersionParams& dp, double lambda_root);

// Number of zeros of H_m inside an axis-parallel rectangle by the argument
// principle. The rectangle must not meet (-inf, 0].
int count_complex_roots(const DispersionParams& dp, std::complex<double> lower_left,
                        std::complex<double> upper_right, int samples_per_side = 2000);

}  // namespace cellwave
