#include "cellwave/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "cellwave/errors.hpp"

namespace cellwave {

namespace {

double require_number(const json& doc, const std::string& key) {
    auto it = doc.find(key);
    if (it == doc.end()) throw InvalidParameters("missing parameter '" + key + "'");
    if (!it->is_number()) throw InvalidParameters("parameter '" + key + "' must be a number");
    return it->get<double>();
}

double optional_number(const json& doc, const std::string& key, double fallback) {
    auto it = doc.find(key);
    if (it == doc.end()) return fallback;
    if (!it->is_number()) throw InvalidParameters("parameter '" + key + "' must be a number");
    return it->get<double>();
}

ActiveForce force_from_json(const json& f) {
    static const std::set<std::string> known = {"kind", "L", "alpha", "rows"};
    for (auto it = f.begin(); it != f.end(); ++it)
        if (!known.count(it.key())) throw InvalidParameters("unknown force key '" + it.key() + "'");
    auto kind_it = f.find("kind");
    if (kind_it == f.end() || !kind_it->is_string())
        throw InvalidParameters("missing parameter 'force.kind'");
    const std::string kind = kind_it->get<std::string>();
    if (kind == "hill") return ActiveForce::hill(require_number(f, "L"), require_number(f, "alpha"));
    if (kind == "table") {
        auto rows_it = f.find("rows");
        if (rows_it == f.end() || !rows_it->is_array())
            throw InvalidParameters("table force needs 'force.rows' as an array of [s, f, f', f'', f''']");
        std::vector<ForceSample> rows;
        for (const auto& r : *rows_it) {
            if (!r.is_array() || r.size() != 5)
                throw InvalidParameters("each force table row must have 5 numbers");
            for (const auto& v : r)
                if (!v.is_number()) throw InvalidParameters("force table entries must be numbers");
            rows.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                            r[3].get<double>(), r[4].get<double>()});
        }
        std::optional<double> L;
        if (f.contains("L")) L = require_number(f, "L");
        return ActiveForce::from_table(std::move(rows), L);
    }
    throw InvalidParameters("unsupported force.kind '" + kind + "' (expected hill or table)");
}

}  // namespace

ModelParams params_from_json(const json& doc) {
    if (!doc.is_object()) throw InvalidParameters("parameter document must be a JSON object");
    json force = json::object();
    bool nested = false;
    if (auto it = doc.find("force"); it != doc.end()) {
        if (!it->is_object()) throw InvalidParameters("'force' must be an object");
        force = *it;
        nested = true;
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (key.rfind("force.", 0) == 0) {
            if (nested) throw InvalidParameters("mixing nested 'force' with flat 'force.*' keys");
            force[key.substr(6)] = it.value();
        }
    }
    if (force.empty()) throw InvalidParameters("missing parameter 'force.kind'");

    ModelParams p;
    p.gamma = require_number(doc, "gamma");
    p.a = require_number(doc, "a");
    p.M = require_number(doc, "M");
    p.R0 = require_number(doc, "R0");
    p.chi = optional_number(doc, "chi", 0.0);
    p.p1 = optional_number(doc, "p1", 0.0);
    p.force = force_from_json(force);
    p.validate();
    return p;
}

json params_to_json(const ModelParams& p) {
    json force = {{"kind", to_string(p.force.kind())}, {"L", number(p.force.L())}};
    if (p.force.kind() == ForceKind::hill) force["alpha"] = number(p.force.alpha());
    if (p.force.kind() == ForceKind::table) {
        json rows = json::array();
        for (const auto& r : p.force.table()) rows.push_back({r.s, r.f, r.d1, r.d2, r.d3});
        force["rows"] = rows;
    }
    return {{"gamma", number(p.gamma)}, {"chi", number(p.chi)}, {"a", number(p.a)},
            {"M", number(p.M)},         {"R0", number(p.R0)},   {"p1", number(p.p1)},
            {"force", force}};
}

json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

json to_json(const StationaryState& s) {
    return {{"c_tilde", number(s.c_tilde)}, {"P_tilde", number(s.P_tilde)}};
}

json to_json(const NonexistenceCertificate& c) {
    return {{"holds", c.holds},
            {"sup_value", number(c.sup_value)},
            {"argmax", number(c.argmax)},
            {"analytic", c.analytic},
            {"argmax_on_boundary", c.argmax_on_boundary}};
}

json to_json(const WaveDiagnostics& d) {
    return {{"G_residual", number(d.G_residual)},
            {"G_quadrature_error", number(d.G_quadrature_error)},
            {"closure_defect", number(d.closure_defect)},
            {"curvature_residual", number(d.curvature_residual)},
            {"mass_relative_error", number(d.mass_relative_error)},
            {"com_error", number(d.com_error)},
            {"convex", d.convex},
            {"tip_curvature", number(d.tip_curvature)},
            {"tip_curvature_expected", number(d.tip_curvature_expected)},
            {"tip_curvature_error", number(d.tip_curvature_error)},
            {"passed", d.passed()}};
}

json to_json(const std::vector<ScanPoint>& scan) {
    json arr = json::array();
    for (const auto& s : scan) arr.push_back({{"V", number(s.V)}, {"G", number(s.G)}});
    return arr;
}

json to_json(const TravelingWave& w, bool include_grid) {
    json brackets = json::array();
    for (const auto& [a, b] : w.brackets) brackets.push_back({number(a), number(b)});
    json doc = {
        {"params", params_to_json(w.params)},
        {"V", number(w.V)},
        {"V_max", number(w.V_max)},
        {"xL", number(w.profile.xL)},
        {"xR", number(w.profile.xR)},
        {"c1", number(w.profile.c1)},
        {"area", number(w.area)},
        {"mass_check", number(w.mass_check)},
        {"com_velocity", {number(w.com_velocity.x), number(w.com_velocity.y)}},
        {"curvature_residual", number(w.curvature_residual)},
        {"closure_defect", number(w.closure_defect)},
        {"iterations", {{"c1_fixed_point", w.c1_iterations}, {"V_bisection", w.V_bisections}}},
        {"bisection_converged", w.bisection_converged},
        {"sign_change_brackets", brackets},
        {"scan", to_json(w.scan)},
        {"diagnostics", to_json(w.diagnostics)},
    };
    if (include_grid) {
        json x = json::array(), y = json::array(), h = json::array();
        for (double v : w.profile.grid) x.push_back(number(v));
        for (double v : w.profile.Y) y.push_back(number(v));
        for (double v : w.profile.h) h.push_back(number(v));
        doc["grid"] = {{"x", x}, {"Y", y}, {"h", h}};
    }
    return doc;
}

json to_json(const SpectrumResult& r) {
    json eig = json::array(), res = json::array();
    for (double v : r.eigenvalues) eig.push_back(number(v));
    for (double v : r.residuals) res.push_back(number(v));
    return {{"m", r.m},
            {"kappa_act", number(r.kappa_act)},
            {"eigenvalues", eig},
            {"residuals", res},
            {"leading", r.leading ? number(*r.leading) : json(nullptr)},
            {"zero_multiplicity", r.zero_multiplicity},
            {"truncated", r.truncated}};
}

json to_json(const BifurcationReport& r) {
    return {{"chi_star", number(r.chi_star)},
            {"chi_pp0", number(r.chi_pp0)},
            {"eta", number(r.eta)},
            {"classification", to_string(r.classification)},
            {"Vprime0", number(r.Vprime0)}};
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string boundary_csv(const Polyline& boundary) {
    std::string out = "x,y,nx,ny\n";
    for (const auto& p : boundary) {
        out += format_number(p.x) + ',' + format_number(p.y) + ',' + format_number(p.nx) + ',' +
               format_number(p.ny) + '\n';
    }
    return out;
}

std::string branch_csv(const std::vector<BranchRow>& rows) {
    std::string out = "chi,V,xL,xR,area,c1,errors\n";
    for (const auto& r : rows) {
        out += format_number(r.chi);
        if (r.ok) {
            out += ',' + format_number(r.V) + ',' + format_number(r.xL) + ',' + format_number(r.xR) +
                   ',' + format_number(r.area) + ',' + format_number(r.c1) + ",\n";
        } else {
            std::string e = r.error;
            std::replace(e.begin(), e.end(), '"', '\'');
            out += ",,,,,,\"" + e + "\"\n";
        }
    }
    return out;
}

std::string dispersion_csv(const DispersionParams& dp, double lo, double hi, int n) {
    if (n < 2 || !(lo < hi)) throw InvalidParameters("dispersion_csv: need n >= 2 and lo < hi");
    std::string out = "lambda,H\n";
    for (int i = 0; i < n; ++i) {
        const double l = lo + (hi - lo) * i / (n - 1);
        out += format_number(l) + ',' + format_number(eval_Hm(dp, l)) + '\n';
    }
    return out;
}

std::string boundary_svg(const Polyline& boundary) {
    if (boundary.empty()) throw GeometryError("boundary_svg: empty boundary");
    double xmin = boundary[0].x, xmax = xmin, ymin = boundary[0].y, ymax = ymin;
    for (const auto& p : boundary) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double size = 1000.0, margin = 0.05 * size;
    const double span = std::max(xmax - xmin, ymax - ymin);
    if (!(span > 0)) throw GeometryError("boundary_svg: degenerate boundary");
    const double scale = (size - 2 * margin) / span;
    const double ox = margin + 0.5 * ((size - 2 * margin) - scale * (xmax - xmin));
    const double oy = margin + 0.5 * ((size - 2 * margin) - scale * (ymax - ymin));

    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" "
          "height=\"1000\">\n<path d=\"";
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        const double px = ox + scale * (boundary[i].x - xmin);
        const double py = size - (oy + scale * (boundary[i].y - ymin));  // y axis up
        os << (i == 0 ? "M" : " L") << px << ' ' << py;
    }
    os << " Z\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n</svg>\n";
    return os.str();
}

}  // namespace cellwave
