#include "polcascade/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace polcascade {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
T parse_number(std::string_view text, std::string_view key, std::size_t line) {
    text = trim(text);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw ConfigError(line, std::string(key), "expected a number, got '" + std::string(text) + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw ConfigError(line, std::string(key), "value must be finite");
    }
    return value;
}

std::vector<double> parse_list(std::string_view text, std::string_view key, std::size_t line) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        out.push_back(parse_number<double>(item, key, line));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += format_double(xs[i]);
    }
    return out;
}

std::string one_of(std::string_view value, std::initializer_list<std::string_view> allowed, std::string_view key,
                   std::size_t line) {
    for (auto a : allowed) {
        if (value == a) return std::string(value);
    }
    std::string msg = "expected one of";
    for (auto a : allowed) msg += " " + std::string(a);
    throw ConfigError(line, std::string(key), msg + ", got '" + std::string(value) + "'");
}

void require(bool ok, std::string_view key, std::size_t line, const char* message) {
    if (!ok) throw ConfigError(line, std::string(key), message);
}

}  // namespace

std::vector<double> DegreeGrid::values() const {
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

DegreeGrid parse_grid(std::string_view text) {
    const auto a = text.find(':');
    const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
    if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos) {
        throw ConfigError(0, "grid", "expected start:stop:step, got '" + std::string(text) + "'");
    }
    DegreeGrid g{parse_number<double>(text.substr(0, a), "grid", 0),
                 parse_number<double>(text.substr(a + 1, b - a - 1), "grid", 0),
                 parse_number<double>(text.substr(b + 1), "grid", 0)};
    if (!(g.step > 0.0)) throw ConfigError(0, "grid.step", "step must be > 0");
    if (g.stop < g.start) throw ConfigError(0, "grid.stop", "stop must be >= start");
    return g;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw, std::size_t line) {
    const std::string_view value = trim(raw);
    const std::string k(key);
    auto number = [&] { return parse_number<double>(value, key, line); };
    auto count = [&] { return parse_number<std::uint64_t>(value, key, line); };

    if (key == "epsilon") {
        c.epsilon = number();
        require(c.epsilon >= 0.0 && c.epsilon <= 1.0, key, line, "must lie in [0, 1]");
    } else if (key == "hv.a") {
        c.hv.a = number();
        require(c.hv.a > 0.0, key, line, "must be > 0");
    } else if (key == "hv.e") {
        c.hv.e = number();
        require(c.hv.e > 0.0, key, line, "must be > 0");
    } else if (key == "hv.c") {
        c.hv.c = number();
        require(c.hv.c >= 0.0, key, line, "must be >= 0");
    } else if (key == "law") {
        c.law = one_of(value, {"hv", "malus", "ideal", "table"}, key, line);
    } else if (key == "law.table") {
        c.law_table = std::string(value);
    } else if (key == "model") {
        c.model = one_of(value, {"qm", "hv", "both"}, key, line);
    } else if (key == "grid") {
        try {
            c.grid = parse_grid(value);
        } catch (const ConfigError& e) {
            throw ConfigError(line, k, e.what());
        }
    } else if (key == "grid.start") {
        c.grid.start = number();
    } else if (key == "grid.stop") {
        c.grid.stop = number();
    } else if (key == "grid.step") {
        c.grid.step = number();
        require(c.grid.step > 0.0, key, line, "must be > 0");
    } else if (key == "cascade.axes") {
        c.axes_deg = parse_list(value, key, line);
    } else if (key == "epr.angles") {
        c.angles_deg = parse_list(value, key, line);
    } else if (key == "mc.n_pairs") {
        c.n_pairs = count();
        require(c.n_pairs >= 1, key, line, "must be >= 1");
    } else if (key == "mc.seed" || key == "seed") {
        c.seed = count();
    } else if (key == "bell.scenario") {
        c.scenario = one_of(value, {"classical", "tensor", "free", "all"}, key, line);
    } else if (key == "bell.dim") {
        c.dim = count();
        require(c.dim == 2 || c.dim == 4 || c.dim == 8, key, line, "must be 2, 4 or 8");
    } else if (key == "bell.restarts") {
        c.restarts = count();
        require(c.restarts >= 1, key, line, "must be >= 1");
    } else if (key == "bell.settings") {
        c.settings_deg = parse_list(value, key, line);
        require(c.settings_deg.size() == 4, key, line, "needs exactly four angles");
    } else if (key == "tol.quadrature") {
        c.quadrature_tol = number();
        require(c.quadrature_tol > 0.0, key, line, "must be > 0");
    } else if (key == "tol.beta") {
        c.beta_tol = number();
        require(c.beta_tol > 0.0, key, line, "must be > 0");
    } else if (key == "output.format") {
        c.format = one_of(value, {"csv", "json"}, key, line) == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    } else if (key == "output.path") {
        c.output_path = std::string(value);
    } else if (key == "threads") {
        const auto t = count();
        require(t >= 1 && t <= 1024, key, line, "must lie in [1, 1024]");
        c.threads = static_cast<unsigned>(t);
    } else {
        throw ConfigError(line, k, "unknown key");
    }
}

RunConfig parse_config(std::string_view text) { return parse_config(text, RunConfig{}); }

RunConfig parse_config(std::string_view text, RunConfig config) {
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;

        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "", "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) throw ConfigError(line_no, "", "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, std::string(line), "expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(line_no, "", "missing key before '='");
        const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        apply_setting(config, full, line.substr(eq + 1), line_no);
    }
    if (config.grid.stop < config.grid.start) throw ConfigError(0, "grid.stop", "must be >= grid.start");
    return config;
}

std::vector<std::pair<std::string, std::string>> resolved_settings(const RunConfig& c) {
    return {
        {"epsilon", format_double(c.epsilon)},
        {"hv.a", format_double(c.hv.a)},
        {"hv.e", format_double(c.hv.e)},
        {"hv.c", format_double(c.hv.c)},
        {"law", c.law},
        {"law.table", c.law_table},
        {"model", c.model},
        {"grid.start", format_double(c.grid.start)},
        {"grid.stop", format_double(c.grid.stop)},
        {"grid.step", format_double(c.grid.step)},
        {"cascade.axes", join(c.axes_deg)},
        {"epr.angles", join(c.angles_deg)},
        {"mc.n_pairs", std::to_string(c.n_pairs)},
        {"mc.seed", std::to_string(c.seed)},
        {"bell.scenario", c.scenario},
        {"bell.dim", std::to_string(c.dim)},
        {"bell.restarts", std::to_string(c.restarts)},
        {"bell.settings", join(c.settings_deg)},
        {"tol.quadrature", format_double(c.quadrature_tol)},
        {"tol.beta", format_double(c.beta_tol)},
        {"output.format", c.format == OutputFormat::Csv ? "csv" : "json"},
    };
}

std::string serialize(const RunConfig& config) {
    std::string out;
    for (const auto& [k, v] : resolved_settings(config)) out += k + " = " + v + "\n";
    return out;
}

TabulatedResponse parse_table(std::string_view text) {
    std::vector<TabulatedResponse::Point> pts;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) throw ConfigError(line_no, "law.table", "expected deviation_deg,p");
        const auto head = trim(line.substr(0, comma));
        if (line_no == 1 && !head.empty() && std::isalpha(static_cast<unsigned char>(head.front()))) {
            continue;  // column header
        }
        pts.emplace_back(deg_to_rad(parse_number<double>(head, "law.table", line_no)),
                         parse_number<double>(line.substr(comma + 1), "law.table", line_no));
    }
    try {
        return TabulatedResponse(std::move(pts));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, "law.table", e.what());
    }
}

ResponseLaw make_law(const RunConfig& c) {
    if (c.law == "hv") return HvStep{c.hv};
    if (c.law == "malus") return GeneralizedMalus{c.epsilon};
    if (c.law == "ideal") return IdealMalus{};
    if (c.law_table.empty()) throw ConfigError(0, "law.table", "law = table needs a table file");
    std::ifstream in(c.law_table);
    if (!in) throw ConfigError(0, "law.table", "cannot read '" + c.law_table + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_table(ss.str());
}

}  // namespace polcascade
