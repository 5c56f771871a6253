#pragma once

#include <vector>

namespace cellwave {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

// Cached n-point rule; the reference stays valid for the process lifetime.
const GaussLegendre& gauss_legendre(int n);

// Integral of f over [a, b] with the n-point rule.
template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
    const GaussLegendre& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

}  // namespace cellwave
