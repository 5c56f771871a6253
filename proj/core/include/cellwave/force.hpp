#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cellwave {

enum class ForceKind { hill, table, custom };

std::string to_string(ForceKind kind);

struct ForceCallables {
    std::function<double(double)> f;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    std::function<double(double)> d3;
};

// One sample of a tabulated force: s, f(s), f'(s), f''(s), f'''(s).
struct ForceSample {
    double s, f, d1, d2, d3;
};

// Sample points used to check user-supplied derivatives.
struct ForceCheck {
    double s_lo = 1e-3;
    double s_hi = 1e3;
    int points = 61;
    double rel_tolerance = 1e-6;
};

// Active traction f with derivatives up to third order and its bound L.
class ActiveForce {
public:
    static ActiveForce hill(double L, double alpha);
    static ActiveForce from_callables(ForceCallables fns, double L, const ForceCheck& check = {});
    // Rows must start at s = 0 with f = 0; evaluation outside the table raises OutOfRange.
    static ActiveForce from_table(std::vector<ForceSample> rows,
                                  std::optional<double> L = std::nullopt);

    ForceKind kind() const { return kind_; }
    double L() const { return L_; }
    double alpha() const { return alpha_; }  // Hill only, NaN otherwise
    const std::vector<ForceSample>& table() const;

    double f(double s) const;
    double d1(double s) const;
    double d2(double s) const;
    double d3(double s) const;

private:
    struct Table;
    ActiveForce() = default;
    double table_channel(int channel, double s) const;

    ForceKind kind_ = ForceKind::hill;
    double L_ = 0;
    double alpha_ = 0;
    std::shared_ptr<const ForceCallables> fns_;
    std::shared_ptr<const Table> table_;
};

}  // namespace cellwave
