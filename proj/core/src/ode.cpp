#include "cellwave/ode.hpp"

namespace cellwave {

double DenseStep::value_at(double x) const {
    const double t = (x - x0) / h;
    const double r2 = y1 - y0;
    return y0 + t * (r2 + (1 - t) * (r3 + t * (r4 + (1 - t) * r5)));
}

double DenseStep::derivative_at(double x) const {
    const double t = (x - x0) / h;
    const double r2 = y1 - y0;
    const double c = r4 + (1 - t) * r5;
    const double b = r3 + t * c;
    const double a = r2 + (1 - t) * b;
    const double db = c - t * r5;
    const double da = -b + (1 - t) * db;
    return (a + t * da) / h;
}

bool DenseSolution::covers(double x) const {
    if (steps_.empty()) return false;
    const double lo = std::min(x_begin(), x_end());
    const double hi = std::max(x_begin(), x_end());
    return x >= lo && x <= hi;
}

const DenseStep& DenseSolution::locate(double x) const {
    if (steps_.empty()) throw Error("DenseSolution: empty");
    const bool forward = steps_.front().h > 0;
    // Steps are monotone in x; binary search on the far end of each step.
    auto it = std::lower_bound(steps_.begin(), steps_.end(), x,
                               [forward](const DenseStep& s, double v) {
                                   return forward ? s.x1() < v : s.x1() > v;
                               });
    if (it == steps_.end()) return steps_.back();
    return *it;
}

double DenseSolution::value(double x) const { return locate(x).value_at(x); }

double DenseSolution::derivative(double x) const { return locate(x).derivative_at(x); }

}  // namespace cellwave
