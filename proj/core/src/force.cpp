#include "cellwave/force.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "cellwave/errors.hpp"

namespace cellwave {

std::string to_string(ForceKind kind) {
    switch (kind) {
        case ForceKind::hill: return "hill";
        case ForceKind::table: return "table";
        case ForceKind::custom: return "custom";
    }
    return "unknown";
}

struct ActiveForce::Table {
    std::vector<ForceSample> rows;
    std::vector<double> d4;  // slopes for the third-derivative channel
};

namespace {

double channel_value(const ForceSample& r, int channel) {
    switch (channel) {
        case 0: return r.f;
        case 1: return r.d1;
        case 2: return r.d2;
        default: return r.d3;
    }
}

// Central difference of g with Richardson extrapolation.
double richardson_derivative(const std::function<double(double)>& g, double s) {
    const double h = 1e-3 * s;
    const double d_h = (g(s + h) - g(s - h)) / (2 * h);
    const double d_h2 = (g(s + h / 2) - g(s - h / 2)) / h;
    return (4 * d_h2 - d_h) / 3;
}

void check_consistency(const std::function<double(double)>& g,
                       const std::function<double(double)>& dg, const char* name,
                       const ForceCheck& check) {
    const double ratio = std::pow(check.s_hi / check.s_lo, 1.0 / (check.points - 1));
    double scale = 0;
    for (int k = 0; k < check.points; ++k)
        scale = std::max(scale, std::fabs(dg(check.s_lo * std::pow(ratio, k))));
    for (int k = 0; k < check.points; ++k) {
        const double s = check.s_lo * std::pow(ratio, k);
        const double exact = dg(s);
        const double approx = richardson_derivative(g, s);
        const double h = 1e-3 * s;
        const double rounding = 50 * std::numeric_limits<double>::epsilon() *
                                std::max(std::fabs(g(s - h)), std::fabs(g(s + h))) / h;
        const double tol = check.rel_tolerance * std::max(std::fabs(exact), 1e-6 * scale) + rounding;
        if (!std::isfinite(exact) || std::fabs(approx - exact) > tol) {
            std::ostringstream os;
            os << "force derivative check failed for " << name << " at s = " << s
               << ": supplied " << exact << ", finite difference " << approx;
            throw InvalidParameters(os.str());
        }
    }
}

}  // namespace

ActiveForce ActiveForce::hill(double L, double alpha) {
    if (!(L > 0) || !std::isfinite(L)) throw InvalidParameters("hill force: L must be positive");
    if (!(alpha > 0) || !std::isfinite(alpha))
        throw InvalidParameters("hill force: alpha must be positive");
    ActiveForce force;
    force.kind_ = ForceKind::hill;
    force.L_ = L;
    force.alpha_ = alpha;
    return force;
}

ActiveForce ActiveForce::from_callables(ForceCallables fns, double L, const ForceCheck& check) {
    if (!fns.f || !fns.d1 || !fns.d2 || !fns.d3)
        throw InvalidParameters("custom force: all four callables are required");
    if (!(L > 0) || !std::isfinite(L)) throw InvalidParameters("custom force: L must be positive");
    if (std::fabs(fns.f(0.0)) > 1e-14 * L) throw InvalidParameters("custom force: f(0) must be 0");
    const double ratio = std::pow(check.s_hi / check.s_lo, 1.0 / (check.points - 1));
    double prev = fns.f(0.0);
    for (int k = 0; k < check.points; ++k) {
        const double v = fns.f(check.s_lo * std::pow(ratio, k));
        // Equal neighbours are accepted only once f has saturated at L in floating point.
        if (!(v >= prev) || (v == prev && v < L * (1 - 1e-12)))
            throw InvalidParameters("custom force: f must be strictly increasing");
        if (v > L * (1 + 1e-12)) throw InvalidParameters("custom force: f exceeds its bound L");
        prev = v;
    }
    check_consistency(fns.f, fns.d1, "f'", check);
    check_consistency(fns.d1, fns.d2, "f''", check);
    check_consistency(fns.d2, fns.d3, "f'''", check);

    ActiveForce force;
    force.kind_ = ForceKind::custom;
    force.L_ = L;
    force.alpha_ = std::numeric_limits<double>::quiet_NaN();
    force.fns_ = std::make_shared<const ForceCallables>(std::move(fns));
    return force;
}

ActiveForce ActiveForce::from_table(std::vector<ForceSample> rows, std::optional<double> L) {
    if (rows.size() < 3) throw InvalidParameters("force table: at least 3 rows required");
    for (const auto& r : rows) {
        if (!std::isfinite(r.s) || !std::isfinite(r.f) || !std::isfinite(r.d1) ||
            !std::isfinite(r.d2) || !std::isfinite(r.d3))
            throw InvalidParameters("force table: non-finite entry");
    }
    if (rows.front().s != 0.0 || rows.front().f != 0.0)
        throw InvalidParameters("force table: first row must be s = 0 with f = 0");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i].s > rows[i - 1].s))
            throw InvalidParameters("force table: abscissae must be strictly increasing");
        if (!(rows[i].f > rows[i - 1].f))
            throw InvalidParameters("force table: f must be strictly increasing");
    }
    const double bound = L.value_or(rows.back().f);
    if (!(bound > 0)) throw InvalidParameters("force table: L must be positive");
    for (const auto& r : rows)
        if (r.f > bound * (1 + 1e-12)) throw InvalidParameters("force table: f exceeds L");

    // Divided differences of each channel must agree with the next channel.
    for (int channel = 0; channel < 3; ++channel) {
        double scale = 0;
        for (const auto& r : rows) scale = std::max(scale, std::fabs(channel_value(r, channel + 1)));
        for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
            const double dd = (channel_value(rows[i + 1], channel) - channel_value(rows[i - 1], channel)) /
                              (rows[i + 1].s - rows[i - 1].s);
            const double given = channel_value(rows[i], channel + 1);
            if (std::fabs(dd - given) > 5e-2 * std::max(scale, 1e-12)) {
                std::ostringstream os;
                os << "force table: derivative channel " << channel + 1
                   << " inconsistent with channel " << channel << " at s = " << rows[i].s;
                throw InvalidParameters(os.str());
            }
        }
    }

    auto table = std::make_shared<Table>();
    table->rows = std::move(rows);
    const auto& t = table->rows;
    table->d4.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == t.size() ? i : i + 1;
        table->d4[i] = (t[hi].d3 - t[lo].d3) / (t[hi].s - t[lo].s);
    }

    ActiveForce force;
    force.kind_ = ForceKind::table;
    force.L_ = bound;
    force.alpha_ = std::numeric_limits<double>::quiet_NaN();
    force.table_ = std::move(table);
    return force;
}

const std::vector<ForceSample>& ActiveForce::table() const {
    static const std::vector<ForceSample> none;
    return table_ ? table_->rows : none;
}

double ActiveForce::table_channel(int channel, double s) const {
    const auto& rows = table_->rows;
    if (!(s >= rows.front().s) || !(s <= rows.back().s)) {
        std::ostringstream os;
        os << "force table evaluated outside [" << rows.front().s << ", " << rows.back().s
           << "] at s = " << s;
        throw OutOfRange(os.str());
    }
    auto it = std::upper_bound(rows.begin(), rows.end(), s,
                               [](double v, const ForceSample& r) { return v < r.s; });
    std::size_t i = it == rows.end() ? rows.size() - 2
                                     : static_cast<std::size_t>(it - rows.begin()) - 1;
    if (i + 1 >= rows.size()) i = rows.size() - 2;
    const ForceSample& a = rows[i];
    const ForceSample& b = rows[i + 1];
    const double h = b.s - a.s;
    const double t = (s - a.s) / h;
    const double va = channel_value(a, channel);
    const double vb = channel_value(b, channel);
    const double ma = channel < 3 ? channel_value(a, channel + 1) : table_->d4[i];
    const double mb = channel < 3 ? channel_value(b, channel + 1) : table_->d4[i + 1];
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * va + (t3 - 2 * t2 + t) * h * ma + (-2 * t3 + 3 * t2) * vb +
           (t3 - t2) * h * mb;
}

double ActiveForce::f(double s) const {
    switch (kind_) {
        case ForceKind::hill: return L_ * s / (alpha_ + s);
        case ForceKind::custom: return fns_->f(s);
        case ForceKind::table: return table_channel(0, s);
    }
    return 0;
}

double ActiveForce::d1(double s) const {
    switch (kind_) {
        case ForceKind::hill: {
            const double q = alpha_ + s;
            return L_ * alpha_ / (q * q);
        }
        case ForceKind::custom: return fns_->d1(s);
        case ForceKind::table: return table_channel(1, s);
    }
    return 0;
}

double ActiveForce::d2(double s) const {
    switch (kind_) {
        case ForceKind::hill: {
            const double q = alpha_ + s;
            return -2 * L_ * alpha_ / (q * q * q);
        }
        case ForceKind::custom: return fns_->d2(s);
        case ForceKind::table: return table_channel(2, s);
    }
    return 0;
}

double ActiveForce::d3(double s) const {
    switch (kind_) {
        case ForceKind::hill: {
            const double q = alpha_ + s;
            return 6 * L_ * alpha_ / (q * q * q * q);
        }
        case ForceKind::custom: return fns_->d3(s);
        case ForceKind::table: return table_channel(3, s);
    }
    return 0;
}

}  // namespace cellwave
