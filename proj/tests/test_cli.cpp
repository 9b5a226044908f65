#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "polcascade/cli.hpp"

namespace fs = std::filesystem;
using polcascade::cli::run_command;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "polcascade");
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

// Data rows of a CSV report (after the comment block and the header line).
std::vector<std::vector<std::string>> rows_of(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    bool header_seen = false;
    for (const auto& line : lines_of(csv)) {
        if (line.rfind("#", 0) == 0) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string header_of(const std::string& csv) {
    for (const auto& line : lines_of(csv)) {
        if (line.rfind("#", 0) != 0) return line;
    }
    return {};
}

fs::path scratch_dir() {
    auto dir = fs::temp_directory_path() / "polcascade_cli_tests";
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("ideal QM sweep puts the minimum at alpha + 90 with zero transmission") {
    const auto r = run({"sweep", "--model", "qm", "--epsilon", "0", "--alpha", "0:90:1"});
    REQUIRE(r.code == 0);
    CHECK(header_of(r.out) == "alpha_deg,beta_star_deg,p_min,model");
    const auto rows = rows_of(r.out);
    REQUIRE(rows.size() == 91);
    for (const auto& row : rows) {
        const double alpha = std::stod(row[0]);
        const double beta = std::stod(row[1]);
        REQUIRE(std::abs(std::stod(row[2])) < 1e-12);
        const double offset = std::remainder(beta - alpha - 90.0, 180.0);
        REQUIRE(std::abs(offset) < 1e-4);
        REQUIRE(row[3] == "qm");
    }
}

TEST_CASE("bell subcommand reports the tensor-local maximum") {
    const auto r = run({"bell", "--scenario", "tensor", "--dim", "4", "--restarts", "64", "--seed", "7"});
    REQUIRE(r.code == 0);
    CHECK(header_of(r.out) == "scenario,dim,achieved_max,restarts,seed");
    const auto rows = rows_of(r.out);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][0] == "tensor");
    CHECK(std::abs(std::stod(rows[0][2]) - 2 * std::sqrt(2.0)) < 1e-3);
    CHECK(r.out.find("## classical_max = 2") != std::string::npos);
}

TEST_CASE("epr output is byte-identical across repeats and thread counts") {
    const std::vector<std::string> base = {"epr", "--angles", "0,22.5,45,67.5,90", "--n", "100000", "--seed", "1"};
    const auto a = run(base);
    auto threaded = base;
    threaded.insert(threaded.end(), {"--threads", "4"});
    const auto b = run(base);
    const auto c = run(threaded);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(header_of(a.out) == "rel_angle_deg,p_hat,stderr,p_quadrature,n_pairs");
    CHECK(rows_of(a.out).size() == 5);
}

TEST_CASE("command-line flags override the config file") {
    const auto cfg = scratch_dir() / "eps.conf";
    write_file(cfg, "epsilon = 0.01\n");
    const auto r = run({"cascade", "--config", cfg.string(), "--epsilon", "0.05", "--model", "qm"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# epsilon = 0.050000000000000003") != std::string::npos);
    const auto file_only = run({"cascade", "--config", cfg.string(), "--model", "qm"});
    CHECK(file_only.out.find("# epsilon = 0.01") != std::string::npos);
}

TEST_CASE("cascade rows") {
    const auto r = run({"cascade", "--axes", "0,30,120", "--epsilon", "0.02"});
    REQUIRE(r.code == 0);
    CHECK(header_of(r.out) == "axes_deg,model,p");
    const auto rows = rows_of(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "0;30;120");
    CHECK(rows[0][1] == "qm");
    CHECK(std::stod(rows[0][2]) == doctest::Approx(0.0151).epsilon(1e-9));
    CHECK(rows[1][1] == "hv");
}

TEST_CASE("transmit rows") {
    const auto r = run({"transmit", "--law", "ideal", "--grid", "0:90:30"});
    REQUIRE(r.code == 0);
    CHECK(header_of(r.out) == "deviation_deg,p");
    const auto rows = rows_of(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(std::stod(rows[2][1]) == doctest::Approx(0.25));
}

TEST_CASE("reports round-trip through their embedded configuration") {
    const auto first = run({"sweep", "--model", "hv", "--alpha", "10:30:10", "--hv-a", "1.7", "--tol", "1e-9"});
    REQUIRE(first.code == 0);
    std::string embedded;
    for (const auto& line : lines_of(first.out)) {
        if (line.rfind("# ", 0) == 0) embedded += line.substr(2) + "\n";
    }
    const auto cfg = scratch_dir() / "embedded.conf";
    write_file(cfg, embedded);
    const auto second = run({"sweep", "--config", cfg.string()});
    REQUIRE(second.code == 0);
    CHECK(first.out == second.out);
}

TEST_CASE("json output carries the CSV fields by name") {
    const auto r = run({"cascade", "--format", "json", "--axes", "0,45"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "cascade");
    CHECK(j["config"]["hv.a"] == "1.95");
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0].contains("axes_deg"));
    CHECK(j["rows"][0].contains("model"));
    CHECK(j["rows"][0].contains("p"));
    const auto csv = run({"cascade", "--axes", "0,45"});
    CHECK(j["rows"][1]["p"].get<double>() == doctest::Approx(std::stod(rows_of(csv.out)[1][2])).epsilon(1e-11));
}

TEST_CASE("output file") {
    const auto path = scratch_dir() / "report.csv";
    fs::remove(path);
    const auto r = run({"transmit", "--out", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(fs::file_size(path) > 0);
}

TEST_CASE("error exits") {
    SUBCASE("usage") {
        CHECK(run({}).code == 2);
        CHECK(run({"sweep", "--bogus"}).code == 2);
        CHECK(run({"frobnicate"}).code == 2);
    }
    SUBCASE("config") {
        const auto cfg = scratch_dir() / "bad.conf";
        write_file(cfg, "[hv]\na = -1\n");
        const auto r = run({"transmit", "--config", cfg.string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("hv.a") != std::string::npos);
        CHECK(r.err.find("line 2") != std::string::npos);
        CHECK(run({"transmit", "--config", "/nonexistent/x.conf"}).code == 2);
        CHECK(run({"transmit", "--hv-a", "-1"}).code == 2);
        CHECK(run({"cascade", "--axes", "10,20"}).code == 2);
        CHECK(run({"bell", "--scenario", "tensor", "--dim", "2"}).code == 2);
    }
    SUBCASE("budget") {
        const auto r = run({"cascade", "--model", "hv", "--tol", "1e-18"});
        CHECK(r.code == 3);
        CHECK(r.err.find("budget") != std::string::npos);
    }
    SUBCASE("unwritable output") {
        const auto r = run({"transmit", "--out", "/nonexistent/dir/report.csv"});
        CHECK(r.code == 1);
        CHECK(r.err.find("cannot write") != std::string::npos);
    }
    SUBCASE("help") { CHECK(run({"--help"}).code == 0); }
}
