#pragma once

#include <string>

#include "cellwave/model.hpp"

namespace cellwave {

enum class BranchKind { supercritical, subcritical, degenerate };

std::string to_string(BranchKind kind);

// Local branch chi(s) = chi* + eta s^2 + o(s^2), V(s) = s + o(s).
struct BifurcationReport {
    double chi_star = 0;
    double chi_pp0 = 0;
    double eta = 0;  // chi_pp0 / 2
    BranchKind classification = BranchKind::degenerate;
    double Vprime0 = 1.0;
};

// -(a M R0^2 / (2 f'(c~)^2)) [ (M / (2 pi R0^2)) f'''(c~) + f''(c~) ]
double chi_second_derivative(const ModelParams& params);

// Same formula with f'' and f''' replaced by central differences of f'
// with step rel_step * c~.
double chi_second_derivative_fd(const ModelParams& params, double rel_step = 1e-4);

BifurcationReport classify_branch(const ModelParams& params, double rel_tolerance = 1e-12);

}  // namespace cellwave
