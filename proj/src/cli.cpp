#include "polcascade/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <variant>

#include "polcascade/bell.hpp"
#include "polcascade/cascade.hpp"
#include "polcascade/config.hpp"
#include "polcascade/eprmc.hpp"

namespace polcascade::cli {

namespace {

using Cell = std::variant<double, std::string, std::uint64_t>;

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// A finished report. `meta` entries are derived results that do not fit the
// row schema; `settings` is the resolved configuration.
struct Report {
    std::string command;
    std::vector<std::pair<std::string, std::string>> settings;
    std::vector<std::pair<std::string, Cell>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return fmt12(*d);
    if (const auto* u = std::get_if<std::uint64_t>(&c)) return std::to_string(*u);
    return std::get<std::string>(c);
}

nlohmann::json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return std::stod(fmt12(*d));
    if (const auto* u = std::get_if<std::uint64_t>(&c)) return *u;
    return std::get<std::string>(c);
}

std::string render_csv(const Report& r) {
    std::string out = "## polcascade " + r.command + "\n";
    for (const auto& [k, v] : r.settings) out += "# " + k + " = " + v + "\n";
    for (const auto& [k, v] : r.meta) out += "## " + k + " = " + cell_text(v) + "\n";
    for (std::size_t i = 0; i < r.columns.size(); ++i) out += (i ? "," : "") + r.columns[i];
    out += "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
        out += "\n";
    }
    return out;
}

std::string render_json(const Report& r) {
    nlohmann::ordered_json j;
    j["command"] = r.command;
    auto& cfg = j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.settings) cfg[k] = v;
    auto& meta = j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.meta) meta[k] = cell_json(v);
    j["columns"] = r.columns;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i) obj[r.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(obj));
    }
    return j.dump(2) + "\n";
}

std::vector<double> to_radians(const std::vector<double>& deg) {
    std::vector<double> out;
    out.reserve(deg.size());
    for (double d : deg) out.push_back(deg_to_rad(d));
    return out;
}

std::string join_semicolon(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ";" : "") + fmt12(xs[i]);
    return out;
}

bool wants(const RunConfig& c, std::string_view model) { return c.model == "both" || c.model == model; }

Report run_transmit(const RunConfig& c) {
    Report r{"transmit", {}, {}, {"deviation_deg", "p"}, {}};
    const auto law = make_law(c);
    std::uint64_t clamped = 0;
    for (double deg : c.grid.values()) {
        const auto e = evaluate_detailed(law, deg_to_rad(deg));
        clamped += e.clamped ? 1 : 0;
        r.rows.push_back({deg, e.probability});
    }
    r.meta.emplace_back("law", describe(law));
    r.meta.emplace_back("clamped_points", clamped);
    return r;
}

Report run_cascade(const RunConfig& c) {
    Report r{"cascade", {}, {}, {"axes_deg", "model", "p"}, {}};
    if (c.axes_deg.empty() || c.axes_deg.front() != 0.0) {
        throw ConfigError(0, "cascade.axes", "the first axis is the reference and must be 0");
    }
    std::vector<Angle> axes;
    for (double d : c.axes_deg) axes.push_back(Angle::degrees(d));
    const std::string label = join_semicolon(c.axes_deg);
    if (wants(c, "qm")) {
        const auto spec = CascadeSpec::uniform(axes, GeneralizedMalus{c.epsilon}, InputConvention::PolarizedAlongFirstAxis);
        r.rows.push_back({label, std::string("qm"), qm_cascade(spec)});
    }
    if (wants(c, "hv")) {
        const auto spec = CascadeSpec::uniform(axes, make_law(c), InputConvention::UnpolarizedUniformLambda);
        r.rows.push_back({label, std::string("hv"), hv_cascade(spec, c.quadrature_tol)});
    }
    return r;
}

Report run_sweep(const RunConfig& c) {
    Report r{"sweep", {}, {}, {"alpha_deg", "beta_star_deg", "p_min", "model"}, {}};
    std::vector<Angle> grid;
    const auto alphas = c.grid.values();
    for (double d : alphas) grid.push_back(Angle::degrees(d));
    SweepOptions opts;
    opts.quadrature_tol = c.quadrature_tol;
    opts.beta_tol = c.beta_tol;
    opts.threads = c.threads;

    auto emit = [&](const SweepModel& model) {
        const auto rows = min_beta_sweep(grid, model, opts);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            // report alpha as given; Angle canonicalizes 180 to 0
            r.rows.push_back({alphas[i], rows[i].beta_star.deg(), rows[i].p_min, std::string(to_string(rows[i].model))});
        }
    };
    if (wants(c, "qm")) emit(QmModel{c.epsilon});
    if (wants(c, "hv")) {
        const auto law = make_law(c);
        emit(HvModel{law, law, law});
    }
    return r;
}

Report run_bell(const RunConfig& c) {
    Report r{"bell", {}, {}, {"scenario", "dim", "achieved_max", "restarts", "seed"}, {}};
    const auto settings =
        BellSettings::degrees(c.settings_deg[0], c.settings_deg[1], c.settings_deg[2], c.settings_deg[3]);
    r.meta.emplace_back("classical_max", classical_max());
    r.meta.emplace_back("chsh_settings_deg", join_semicolon(c.settings_deg));
    r.meta.emplace_back("chsh_qm", chsh_from_correlations(settings, qm_pair_correlation));

    std::vector<CommutationScenario> scenarios;
    if (c.scenario == "all") {
        scenarios = {CommutationScenario::Classical, CommutationScenario::TensorLocal, CommutationScenario::Free};
    } else {
        scenarios = {*parse_scenario(c.scenario)};
    }
    BellSearchOptions opts;
    opts.threads = c.threads;
    for (auto s : scenarios) {
        const auto res = search_operator_max(s, c.dim, c.restarts, c.seed, opts);
        r.rows.push_back({std::string(to_string(s)), static_cast<std::uint64_t>(res.dimension), res.achieved_max,
                          static_cast<std::uint64_t>(res.restarts_used), c.seed});
    }
    return r;
}

Report run_epr(const RunConfig& c) {
    Report r{"epr", {}, {}, {"rel_angle_deg", "p_hat", "stderr", "p_quadrature", "n_pairs"}, {}};
    const auto law = make_law(c);
    EprCurveOptions opts;
    opts.quadrature_tol = c.quadrature_tol;
    opts.threads = c.threads;
    const auto points = epr_curve(to_radians(c.angles_deg), c.n_pairs, law, law, c.seed, opts);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        r.rows.push_back({c.angles_deg[i], p.p_hat, p.std_error, p.p_quadrature, p.tally.n_pairs});
    }
    return r;
}

using Overrides = std::vector<std::pair<std::string, std::string>>;

void add_setting(CLI::App* app, Overrides& overrides, const std::string& flag, const std::string& key,
                 const std::string& help) {
    app->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); }, help);
}

void add_common(CLI::App* app, Overrides& overrides, std::string& config_path) {
    app->add_option("--config", config_path, "Configuration file (key = value)");
    add_setting(app, overrides, "--epsilon", "epsilon", "Malus pedestal epsilon in [0, 1]");
    add_setting(app, overrides, "--hv-a", "hv.a", "HV response steepness a");
    add_setting(app, overrides, "--hv-e", "hv.e", "HV response exponent e");
    add_setting(app, overrides, "--hv-c", "hv.c", "HV response contrast c");
    add_setting(app, overrides, "--law", "law", "Response law: hv | malus | ideal | table");
    add_setting(app, overrides, "--table", "law.table", "Table file (deviation_deg,p) for --law table");
    add_setting(app, overrides, "--seed", "mc.seed", "Random seed");
    add_setting(app, overrides, "--tol", "tol.quadrature", "Quadrature tolerance");
    add_setting(app, overrides, "--format", "output.format", "csv | json");
    add_setting(app, overrides, "--out", "output.path", "Write the report here instead of standard output");
    add_setting(app, overrides, "--threads", "threads", "Worker threads (does not change results)");
}

}  // namespace

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Polarizer cascade, EPR coincidence and Bell-limit computations", "polcascade"};
    app.require_subcommand(1);
    Overrides overrides;
    std::string config_path;

    auto* transmit = app.add_subcommand("transmit", "Single-polarizer response over a deviation grid");
    add_common(transmit, overrides, config_path);
    add_setting(transmit, overrides, "--grid", "grid", "Deviation grid start:stop:step (degrees)");

    auto* cascade = app.add_subcommand("cascade", "Transmission through polarizers at the given axes");
    add_common(cascade, overrides, config_path);
    add_setting(cascade, overrides, "--axes", "cascade.axes", "Comma-separated axes in degrees, first = 0");
    add_setting(cascade, overrides, "--model", "model", "qm | hv | both");

    auto* sweep = app.add_subcommand("sweep", "Minimum three-polarizer transmission over beta for each alpha");
    add_common(sweep, overrides, config_path);
    add_setting(sweep, overrides, "--alpha", "grid", "Alpha grid start:stop:step (degrees)");
    add_setting(sweep, overrides, "--model", "model", "qm | hv | both");
    add_setting(sweep, overrides, "--beta-tol", "tol.beta", "Final beta bracket width (radians)");

    auto* bell = app.add_subcommand("bell", "Bell combination limits and operator-norm search");
    add_common(bell, overrides, config_path);
    add_setting(bell, overrides, "--scenario", "bell.scenario", "classical | tensor | free | all");
    add_setting(bell, overrides, "--dim", "bell.dim", "Hilbert-space dimension: 2, 4 or 8");
    add_setting(bell, overrides, "--restarts", "bell.restarts", "Random restarts");
    add_setting(bell, overrides, "--settings", "bell.settings", "alpha,alpha',beta,beta' in degrees");

    auto* epr = app.add_subcommand("epr", "Monte Carlo coincidence curve against quadrature");
    add_common(epr, overrides, config_path);
    add_setting(epr, overrides, "--angles", "epr.angles", "Comma-separated relative angles in degrees");
    add_setting(epr, overrides, "--n", "mc.n_pairs", "Photon pairs per angle");

    std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "polcascade: " << e.what() << "\n";
        return kUsageError;
    }

    RunConfig config;
    Report report;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError(0, "", "cannot read config file '" + config_path + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            try {
                config = parse_config(ss.str());
            } catch (const ConfigError& e) {
                throw ConfigError(e.line(), e.key(), config_path + ": " + e.what());
            }
        }
        for (const auto& [key, value] : overrides) apply_setting(config, key, value);
        if (config.grid.stop < config.grid.start) throw ConfigError(0, "grid.stop", "must be >= grid.start");

        const auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "transmit") {
            report = run_transmit(config);
        } else if (name == "cascade") {
            report = run_cascade(config);
        } else if (name == "sweep") {
            report = run_sweep(config);
        } else if (name == "bell") {
            report = run_bell(config);
        } else {
            report = run_epr(config);
        }
    } catch (const ConfigError& e) {
        err << "polcascade: config error: " << e.what() << "\n";
        return kUsageError;
    } catch (const BudgetExceeded& e) {
        err << "polcascade: numerical budget exceeded: " << e.what() << "\n";
        return kBudgetExceeded;
    } catch (const std::invalid_argument& e) {
        err << "polcascade: invalid parameter: " << e.what() << "\n";
        return kUsageError;
    }
    report.settings = resolved_settings(config);

    const std::string text = config.format == OutputFormat::Csv ? render_csv(report) : render_json(report);
    if (config.output_path.empty()) {
        out << text;
        out.flush();
        return out ? kOk : kIoError;
    }
    std::ofstream file(config.output_path, std::ios::binary | std::ios::trunc);
    if (!file || !(file << text) || !file.flush()) {
        err << "polcascade: cannot write output file '" << config.output_path << "'\n";
        return kIoError;
    }
    return kOk;
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run_command(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace polcascade::cli
