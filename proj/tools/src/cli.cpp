#include "cellwave_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cellwave/bifurcation.hpp"
#include "cellwave/errors.hpp"
#include "cellwave/io.hpp"

namespace cellwave::cli {

namespace fs = std::filesystem;

namespace {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool is_param_key(const std::string& key) {
    static const std::set<std::string> keys = {"gamma", "chi", "a", "M", "R0", "p1", "force"};
    return keys.count(key) || key.rfind("force.", 0) == 0;
}

template <class T>
T get_as(const json& v, const std::string& where) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw InvalidParameters("config value '" + where + "' has the wrong type");
    }
}

double positive(const json& v, const std::string& where) {
    if (!v.is_number()) throw InvalidParameters("config value '" + where + "' must be a number");
    const double x = v.get<double>();
    if (!(x > 0) || !std::isfinite(x)) throw InvalidParameters("config value '" + where + "' must be positive");
    return x;
}

int at_least_one(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw InvalidParameters("config value '" + where + "' must be an integer");
    const int n = v.get<int>();
    if (n < 1) throw InvalidParameters("config value '" + where + "' must be at least 1");
    return n;
}

void apply_solver(const json& doc, SolverOptions& s) {
    if (!doc.is_object()) throw InvalidParameters("'solver' must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& k = it.key();
        const std::string where = "solver." + k;
        const json& v = it.value();
        if (k == "normalization") {
            const auto name = get_as<std::string>(v, where);
            if (name == "fixed_p1") s.normalization = BranchNormalization::fixed_p1;
            else if (name == "fixed_area") s.normalization = BranchNormalization::fixed_area;
            else throw InvalidParameters("solver.normalization must be fixed_p1 or fixed_area");
        } else if (k == "omega") {
            s.omega = positive(v, where);
            if (s.omega > 1) throw InvalidParameters("solver.omega must lie in (0, 1]");
        } else if (k == "c1_tolerance") s.c1_tolerance = positive(v, where);
        else if (k == "max_iterations") s.max_iterations = at_least_one(v, where);
        else if (k == "G_tolerance") s.G_tolerance = positive(v, where);
        else if (k == "V_width_tolerance") s.V_width_tolerance = positive(v, where);
        else if (k == "scan_levels") s.scan_levels = at_least_one(v, where);
        else if (k == "max_bisections") s.max_bisections = at_least_one(v, where);
        else if (k == "area_tolerance") s.area_tolerance = positive(v, where);
        else if (k == "boundary_resolution") {
            s.boundary_resolution = at_least_one(v, where);
            if (s.boundary_resolution < 16) throw InvalidParameters("solver.boundary_resolution must be at least 16");
        } else if (k == "c1_secant") s.c1_secant = get_as<bool>(v, where);
        else throw InvalidParameters("unknown config key '" + where + "'");
    }
}

void apply_spectrum(const json& doc, RunConfig& cfg) {
    if (!doc.is_object()) throw InvalidParameters("'spectrum' must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& k = it.key();
        const std::string where = "spectrum." + k;
        const json& v = it.value();
        if (k == "lo") {
            if (!v.is_number()) throw InvalidParameters("spectrum.lo must be a number");
            cfg.scan.lo = v.get<double>();
        } else if (k == "hi") {
            if (!v.is_number()) throw InvalidParameters("spectrum.hi must be a number");
            cfg.scan.hi = v.get<double>();
        } else if (k == "max_count") cfg.scan.max_count = at_least_one(v, where);
        else if (k == "trace_points") {
            cfg.trace_points = at_least_one(v, where);
            if (cfg.trace_points < 2) throw InvalidParameters("spectrum.trace_points must be at least 2");
        } else throw InvalidParameters("unknown config key '" + where + "'");
    }
    if (!(cfg.scan.lo < cfg.scan.hi)) throw InvalidParameters("spectrum.lo must be below spectrum.hi");
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidParameters("cannot read config file '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path output_dir(const RunConfig& cfg) {
    fs::path dir = cfg.out.value_or(fs::path("."));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw OutputError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw OutputError("cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw OutputError("write failed for '" + path.string() + "'");
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string g(double v) { return fmt::format("{:.10g}", v); }

void print_scan(std::ostream& out, const std::vector<ScanPoint>& scan) {
    fmt::print(out, "{:>22} {:>22}\n", "V", "G(V)");
    for (const auto& p : scan) fmt::print(out, "{:>22.15g} {:>22.15g}\n", p.V, p.G);
}

}  // namespace

RunConfig load_config(const std::string& json_text, const Overrides& ov) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidParameters(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw InvalidParameters("config must be a JSON object");

    RunConfig cfg;
    json params = json::object();
    bool nested = false;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& k = it.key();
        const json& v = it.value();
        if (k == "params") {
            if (!v.is_object()) throw InvalidParameters("'params' must be an object");
            for (auto p = v.begin(); p != v.end(); ++p) {
                if (!is_param_key(p.key())) throw InvalidParameters("unknown parameter 'params." + p.key() + "'");
                params[p.key()] = p.value();
            }
            nested = true;
        } else if (is_param_key(k)) {
            params[k] = v;
        } else if (k == "out") {
            cfg.out = fs::path(get_as<std::string>(v, k));
        } else if (k == "modes") {
            cfg.modes = get_as<std::vector<int>>(v, k);
        } else if (k == "chis") {
            cfg.chis = get_as<std::vector<double>>(v, k);
        } else if (k == "kappa_act") {
            if (!v.is_number()) throw InvalidParameters("kappa_act must be a number");
            cfg.kappa_act = v.get<double>();
        } else if (k == "solver") {
            apply_solver(v, cfg.solver);
        } else if (k == "spectrum") {
            apply_spectrum(v, cfg);
        } else {
            throw InvalidParameters("unknown config key '" + k + "'");
        }
    }
    if (nested) {
        for (auto it = doc.begin(); it != doc.end(); ++it)
            if (is_param_key(it.key()))
                throw InvalidParameters("parameter '" + it.key() + "' given both at top level and under 'params'");
    }

    if (ov.chi) params["chi"] = *ov.chi;
    if (ov.p1) params["p1"] = *ov.p1;
    cfg.params = params_from_json(params);

    if (ov.kappa_act) cfg.kappa_act = *ov.kappa_act;
    if (ov.modes) cfg.modes = *ov.modes;
    if (ov.chis) cfg.chis = *ov.chis;
    if (ov.out) cfg.out = fs::path(*ov.out);
    if (ov.fixed_area) cfg.solver.normalization = BranchNormalization::fixed_area;
    cfg.json = ov.json;

    if (cfg.kappa_act && !(*cfg.kappa_act >= 0)) throw InvalidParameters("kappa_act must be non-negative");
    if (cfg.modes.empty()) throw InvalidParameters("mode list is empty");
    for (int m : cfg.modes)
        if (m < 0) throw InvalidParameters("modes must be non-negative");
    for (double c : cfg.chis)
        if (!(c >= 0) || !std::isfinite(c)) throw InvalidParameters("chi grid values must be finite and non-negative");
    return cfg;
}

int cmd_threshold(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const auto& p = cfg.params;
    const double cs = chi_star(p);
    const auto st = stationary_state(p);
    const auto cert = nonexistence_certificate(p);
    const json doc = {{"params", params_to_json(p)},
                      {"chi_star", number(cs)},
                      {"stationary_state", to_json(st)},
                      {"nonexistence_certificate", to_json(cert)}};
    if (cfg.out) write_file(output_dir(cfg) / "threshold.json", dump(doc));
    if (cfg.json) {
        out << dump(doc);
        return ok;
    }
    fmt::print(out, "chi_star          {}\n", g(cs));
    fmt::print(out, "c_tilde           {}\n", g(st.c_tilde));
    fmt::print(out, "P_tilde           {}\n", g(st.P_tilde));
    fmt::print(out, "chi / chi_star    {}\n", g(p.chi / cs));
    fmt::print(out, "no-wave bound     {} (sup a chi s f'(s) = {} at s = {})\n",
               cert.holds ? "holds" : "does not hold", g(cert.sup_value), g(cert.argmax));
    return ok;
}

int cmd_tw(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto& p = cfg.params;
    if (cfg.solver.normalization == BranchNormalization::fixed_p1 && !(p.p1 > p.chi * p.force.L())) {
        fmt::print(err, "error: precondition violated: p1 = {} must exceed chi L = {}\n", g(p.p1),
                   g(p.chi * p.force.L()));
        return usage_error;
    }

    TravelingWave wave;
    try {
        wave = solve_traveling_wave(p, cfg.solver);
    } catch (const NoTravelingWave& e) {
        if (cfg.json) {
            out << dump({{"status", "no_traveling_wave"}, {"message", e.what()}, {"scan", to_json(e.scan)}});
        } else {
            fmt::print(out, "no traveling wave: {}\n", e.what());
            print_scan(out, e.scan);
        }
        return negative_result;
    }

    const fs::path dir = output_dir(cfg);
    const auto boundary = export_boundary(wave, cfg.solver.boundary_resolution);
    const json doc = to_json(wave);
    write_file(dir / "boundary.csv", boundary_csv(boundary));
    write_file(dir / "shape.svg", boundary_svg(boundary));
    write_file(dir / "wave.json", dump(doc));

    const bool passed = wave.diagnostics.passed();
    if (cfg.json) {
        json summary = doc;
        summary.erase("grid");
        summary.erase("scan");
        out << dump(summary);
    } else {
        fmt::print(out, "V        {}\n", g(wave.V));
        fmt::print(out, "V_max    {}\n", g(wave.V_max));
        fmt::print(out, "p1       {}\n", g(wave.params.p1));
        fmt::print(out, "c1       {}\n", g(wave.profile.c1));
        fmt::print(out, "xL, xR   {}, {}\n", g(wave.profile.xL), g(wave.profile.xR));
        fmt::print(out, "area     {}\n", g(wave.area));
        fmt::print(out, "diagnostics {}\n", passed ? "pass" : "FAIL");
        if (!passed) out << dump(to_json(wave.diagnostics));
        fmt::print(out, "wrote {}, {}, {}\n", (dir / "boundary.csv").string(), (dir / "shape.svg").string(),
                   (dir / "wave.json").string());
    }
    return passed ? ok : negative_result;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    json modes = json::array();
    std::vector<std::pair<int, std::string>> traces;
    std::vector<SpectrumResult> results;
    double kappa = 0;
    for (int m : cfg.modes) {
        auto dp = dispersion_params(cfg.params, m);
        if (cfg.kappa_act) dp.kappa_act = *cfg.kappa_act;
        kappa = dp.kappa_act;
        results.push_back(real_eigenvalues(dp, cfg.scan));
        modes.push_back(to_json(results.back()));
        if (cfg.out) traces.emplace_back(m, dispersion_csv(dp, cfg.scan.lo, cfg.scan.hi, cfg.trace_points));
    }
    bool unstable = false;
    for (const auto& r : results)
        for (double l : r.eigenvalues) unstable = unstable || l > 0;

    json doc = {{"kappa_act", number(kappa)}, {"unstable", unstable}, {"modes", modes}};
    if (!cfg.kappa_act) doc["chi_star"] = number(chi_star(cfg.params));
    if (std::fabs(kappa - 1) < 0.5) {
        DispersionParams dp{1, cfg.params.gamma, cfg.params.R0, kappa};
        doc["leading_eigenvalue_approx"] = number(leading_eigenvalue_approx(dp));
    } else {
        doc["leading_eigenvalue_approx"] = nullptr;
    }

    if (cfg.out) {
        const fs::path dir = output_dir(cfg);
        write_file(dir / "spectrum.json", dump(doc));
        for (const auto& [m, csv] : traces) write_file(dir / fmt::format("dispersion_m{}.csv", m), csv);
    }
    if (cfg.json) {
        out << dump(doc);
        return ok;
    }
    fmt::print(out, "kappa_act {}\n", g(kappa));
    for (const auto& r : results) {
        double worst = 0;
        for (double v : r.residuals) worst = std::max(worst, v);
        fmt::print(out, "m={} roots={} leading={} zero_multiplicity={} max_residual={:.2e}{}\n", r.m,
                   r.eigenvalues.size(), r.leading ? g(*r.leading) : "none", r.zero_multiplicity, worst,
                   r.truncated ? " (truncated)" : "");
        const std::size_t shown = std::min<std::size_t>(r.eigenvalues.size(), 4);
        for (std::size_t i = 0; i < shown; ++i) fmt::print(out, "    {}\n", g(r.eigenvalues[i]));
    }
    fmt::print(out, "{}\n", unstable ? "unstable: positive eigenvalue found" : "no positive eigenvalue");
    return ok;
}

int cmd_bifurcate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const auto report = classify_branch(cfg.params);
    const json doc = to_json(report);
    if (cfg.out) write_file(output_dir(cfg) / "bifurcation.json", dump(doc));
    if (cfg.json) {
        out << dump(doc);
        return ok;
    }
    fmt::print(out, "chi_star        {}\n", g(report.chi_star));
    fmt::print(out, "chi''(0)        {}\n", g(report.chi_pp0));
    fmt::print(out, "eta             {}\n", g(report.eta));
    fmt::print(out, "classification  {}\n", to_string(report.classification));
    return ok;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    if (cfg.chis.empty()) throw InvalidParameters("sweep needs a chi grid (--chis or 'chis' in the config)");
    const auto rows = sweep_chi(cfg.params, cfg.chis, cfg.solver);
    const std::string csv = branch_csv(rows);
    const fs::path dir = output_dir(cfg);
    write_file(dir / "branch.csv", csv);

    bool all_ok = true;
    for (const auto& r : rows) all_ok = all_ok && r.ok;
    if (cfg.json) {
        json arr = json::array();
        for (const auto& r : rows) {
            json row = {{"chi", number(r.chi)}, {"ok", r.ok}};
            if (r.ok) {
                row.update({{"V", number(r.V)}, {"xL", number(r.xL)}, {"xR", number(r.xR)},
                            {"area", number(r.area)}, {"c1", number(r.c1)}});
            } else {
                row["error"] = r.error;
            }
            arr.push_back(row);
        }
        out << dump(arr);
    } else {
        out << csv;
    }
    return all_ok ? ok : negative_result;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"cellwave: traveling waves and stability of an active Hele-Shaw cell model"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    std::optional<double> chi, p1, kappa;
    std::vector<int> modes;
    std::vector<double> chis;
    std::string out_dir;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--chi", chi, "activity override");
        sub->add_option("--p1", p1, "pressure constant override");
        sub->add_flag("--json", ov.json, "print machine-readable JSON");
    };
    auto* threshold = app.add_subcommand("threshold", "activity threshold and no-wave bound");
    auto* tw = app.add_subcommand("tw", "solve for a traveling wave and export its boundary");
    auto* spectrum = app.add_subcommand("spectrum", "real eigenvalues of the linearized disk");
    auto* bifurcate = app.add_subcommand("bifurcate", "local branch coefficients at the threshold");
    auto* sweep = app.add_subcommand("sweep", "traveling-wave branch over a chi grid");
    for (auto* sub : {threshold, tw, spectrum, bifurcate, sweep}) add_common(sub);
    for (auto* sub : {tw, sweep}) sub->add_flag("--fixed-area", ov.fixed_area, "adjust p1 so the area is pi R0^2");
    spectrum->add_option("--modes", modes, "comma-separated mode list")->delimiter(',');
    spectrum->add_option("--kappa", kappa, "use this kappa_act instead of chi / chi_star");
    sweep->add_option("--chis", chis, "comma-separated chi grid")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    ov.chi = chi;
    ov.p1 = p1;
    ov.kappa_act = kappa;
    if (!modes.empty()) ov.modes = modes;
    if (!chis.empty()) ov.chis = chis;
    if (!out_dir.empty()) ov.out = out_dir;

    try {
        const RunConfig cfg = load_config(read_file(config_path), ov);
        if (threshold->parsed()) return cmd_threshold(cfg, out, err);
        if (tw->parsed()) return cmd_tw(cfg, out, err);
        if (spectrum->parsed()) return cmd_spectrum(cfg, out, err);
        if (bifurcate->parsed()) return cmd_bifurcate(cfg, out, err);
        return cmd_sweep(cfg, out, err);
    } catch (const InvalidParameters& e) {
        fmt::print(err, "error: {}\n", e.what());
        return usage_error;
    } catch (const DegenerateForce& e) {
        fmt::print(err, "error: {}\n", e.what());
        return usage_error;
    } catch (const OutputError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return usage_error;
    } catch (const Error& e) {
        fmt::print(err, "failed: {}\n", e.what());
        return negative_result;
    }
}

}  // namespace cellwave::cli
