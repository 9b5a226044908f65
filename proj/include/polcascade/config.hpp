#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polcascade/model.hpp"

namespace polcascade {

/// Error raised while reading a configuration. `line` is 0 for values that
/// came from the command line rather than a file.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, std::string key, const std::string& message)
        : std::runtime_error(format(line, key, message)), line_(line), key_(std::move(key)) {}

    std::size_t line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    static std::string format(std::size_t line, const std::string& key, const std::string& message) {
        std::string out = line ? "line " + std::to_string(line) + ": " : std::string();
        if (!key.empty()) out += "key '" + key + "': ";
        return out + message;
    }

    std::size_t line_;
    std::string key_;
};

/// Inclusive degree grid start, start + step, ... <= stop.
struct DegreeGrid {
    double start = 0.0;
    double stop = 90.0;
    double step = 1.0;

    std::vector<double> values() const;
    friend bool operator==(const DegreeGrid&, const DegreeGrid&) = default;
};

/// Parses "start:stop:step" (degrees).
DegreeGrid parse_grid(std::string_view text);

enum class OutputFormat { Csv, Json };

/// Every tunable of a run. Angles are degrees here; the library works in radians.
struct RunConfig {
    double epsilon = 0.02;
    HvResponseParams hv;
    std::string law = "hv";    // hv | malus | ideal | table
    std::string law_table;     // CSV of deviation_deg,p for law = table
    std::string model = "both";  // qm | hv | both
    DegreeGrid grid;
    std::vector<double> axes_deg = {0.0, 45.0, 90.0};
    std::vector<double> angles_deg = {0.0, 22.5, 45.0, 67.5, 90.0};
    std::uint64_t n_pairs = 1'000'000;
    std::uint64_t seed = 0;
    std::string scenario = "tensor";  // classical | tensor | free | all
    std::size_t dim = 4;
    std::size_t restarts = 64;
    std::vector<double> settings_deg = {0.0, 45.0, 22.5, 157.5};
    double quadrature_tol = 1e-10;
    double beta_tol = 1e-7;
    OutputFormat format = OutputFormat::Csv;
    std::string output_path;  // empty: standard output
    unsigned threads = 1;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Sets one key from its textual value. Throws ConfigError for unknown keys,
/// malformed values and range violations.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value, std::size_t line = 0);

/// Parses the key = value format described in docs/config.md on top of the defaults.
RunConfig parse_config(std::string_view text);

/// Same, starting from `base` instead of the defaults.
RunConfig parse_config(std::string_view text, RunConfig base);

/// Keys and values that determine a run's results, in a fixed order. Excludes
/// output.path and threads, which do not affect any emitted number.
std::vector<std::pair<std::string, std::string>> resolved_settings(const RunConfig& config);

/// resolved_settings rendered as "key = value" lines; parse_config accepts it.
std::string serialize(const RunConfig& config);

/// Builds the response law selected by `law` (reads the table file if needed).
ResponseLaw make_law(const RunConfig& config);

/// Parses a deviation_deg,p table; '#' starts a comment.
TabulatedResponse parse_table(std::string_view text);

}  // namespace polcascade
