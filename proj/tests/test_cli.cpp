#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "darkcav/csv.hpp"
#include "darkcav/model_file.hpp"
#include "doctest.h"

using darkcav::cli::run;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("cli: usage errors exit with 1") {
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    CHECK(invoke({"spectrum", "--model", "/nonexistent/file.model"}).code == 1);
    CHECK(invoke({"sweep", "--ds-range", "0:1"}).code == 1);
    CHECK(invoke({"sweep", "--ds-range", "1:0:3"}).code == 1);
    CHECK(invoke({"protocol", "--preset", "p1"}).code == 1);
    const Result unknown = invoke({"spectrum", "--set", "atom.1.colour=red"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("atom.1.colour") != std::string::npos);
}

TEST_CASE("cli: spectrum of the default model") {
    const Result r = invoke({"spectrum"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0][0] == "index");
    CHECK(rows[0][1] == "eigenvalue");
    CHECK(rows[0][2] == "analytic_eigenvalue");
    CHECK(rows[0][3] == "discrepancy");
    bool found_dark = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(darkcav::parse_double(rows[i][3]) <= 1e-8);
        const double e = darkcav::parse_double(rows[i][1]);
        // photon amplitude is the third component: columns c2_re, c2_im
        const double photon = std::hypot(darkcav::parse_double(rows[i][8]), darkcav::parse_double(rows[i][9]));
        if (std::abs(e - 1.0) < 1e-12) {
            found_dark = true;
            CHECK(photon < 1e-12);
        }
    }
    CHECK(found_dark);
}

TEST_CASE("cli: spectrum of a decoupled model lists bare frequencies") {
    const Result r = invoke({"spectrum", "--set", "atom.1.g=0", "--set", "atom.2.g=0", "--set", "atom.1.omega=0.9",
                             "--set", "atom.2.omega=1.05", "--subspace", "full"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    std::vector<double> values;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        values.push_back(darkcav::parse_double(rows[i][1]));
    }
    const std::vector<double> expected{0.0, 0.9, 1.0, 1.05, 1.9, 1.95, 2.05, 2.95};
    REQUIRE(values.size() == expected.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        CHECK(values[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
}

TEST_CASE("cli: spectrum discrepancy stays small on random models") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> det(-0.05, 0.05), g(0.0, 0.05);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> args{"spectrum"};
        for (const std::string& kv :
             {"atom.1.omega=" + darkcav::format_number(1 + det(rng)), "atom.2.omega=" + darkcav::format_number(1 + det(rng)),
              "atom.1.g=" + darkcav::format_number(g(rng)), "atom.2.g=" + darkcav::format_number(g(rng))}) {
            args.push_back("--set");
            args.push_back(kv);
        }
        const Result r = invoke(args);
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(r.out);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(darkcav::parse_double(rows[i][3]) <= 1e-8);
        }
    }
}

TEST_CASE("cli: dark-find") {
    const Result r = invoke({"dark-find", "--subspace", "single"});
    REQUIRE(r.code == 0);
    CHECK(csv_rows(r.out).size() == 2);
    const Result shifted = invoke({"dark-find", "--subspace", "single", "--set", "zs.ds=0.01"});
    REQUIRE(shifted.code == 0);
    CHECK(csv_rows(shifted.out).size() == 1);
}

TEST_CASE("cli: sweep output, single point and determinism") {
    const Result zero = invoke({"sweep", "--ds-range", "0:0:1", "--dg-range", "0:0:1"});
    REQUIRE(zero.code == 0);
    const auto rows = csv_rows(zero.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"ds", "dg", "p_max", "t_star"});
    CHECK(darkcav::parse_double(rows[1][2]) <= 1e-24);
    CHECK(zero.out.find("# global_max") != std::string::npos);

    const std::vector<std::string> args{"sweep", "--ds-range", "0:0.01:4", "--dg-range", "0:0.007:3", "--seed", "5"};
    const Result a = invoke(args);
    setenv("DARKCAV_WORKERS", "3", 1);
    const Result b = invoke(args);
    unsetenv("DARKCAV_WORKERS");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const auto grid = csv_rows(a.out);
    REQUIRE(grid.size() == 13);
    CHECK(grid[1][0] == "0");
    CHECK(grid[4][0] == "0.0033333333333333335");
}

TEST_CASE("cli: CSV numbers round-trip bit-exactly") {
    for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -2.5e-17, 0.0}) {
        CHECK(darkcav::parse_double(darkcav::format_number(x)) == x);
    }
}

TEST_CASE("cli: --out writes a file identical to stdout") {
    const auto path = std::filesystem::temp_directory_path() / "darkcav_cli_out.csv";
    const Result to_file = invoke({"spectrum", "--out", path.string()});
    REQUIRE(to_file.code == 0);
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    CHECK(buffer.str() == invoke({"spectrum"}).out);
    std::filesystem::remove(path);
}

TEST_CASE("cli: model files") {
    const auto path = write_temp("darkcav_cli.model", "omega_c = 1\natom.1.omega = 1\natom.1.g = 0.02\n"
                                                      "atom.2.omega = 1\natom.2.g = 0.02\n");
    const Result r = invoke({"spectrum", "--model", path.string()});
    CHECK(r.code == 0);
    const auto bad = write_temp("darkcav_cli_bad.model", "omega_c = 1\natom.1.omega = 1\natom.1.g = oops\n");
    const Result e = invoke({"spectrum", "--model", bad.string()});
    CHECK(e.code == 1);
    CHECK(e.err.find(":3:") != std::string::npos);
    std::filesystem::remove(path);
    std::filesystem::remove(bad);
}

TEST_CASE("cli: protocol") {
    const std::vector<std::string> args{"protocol", "--set", "zs.ds=0.01", "--trials", "50", "--max-cycles", "100",
                                        "--seed", "3"};
    const Result a = invoke(args);
    const Result b = invoke(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
    const auto rows = csv_rows(a.out);
    REQUIRE(rows.size() == 51);
    CHECK(rows[0] == std::vector<std::string>{"trial", "cycles_used", "outcome"});
    CHECK(a.err.find("curve_agreement") != std::string::npos);

    const Result null = invoke({"protocol", "--trials", "20", "--max-cycles", "10"});
    REQUIRE(null.code == 0);
    CHECK(null.err.find("null_result") != std::string::npos);
    CHECK(null.err.find("success_fraction=0\n") != std::string::npos);
    for (std::size_t i = 1; i < csv_rows(null.out).size(); ++i) {
        CHECK(csv_rows(null.out)[i][2] == "photon_detected");
    }

    const Result fixed = invoke({"protocol", "--preset", "p1e-4", "--delta-t", "tstar", "--trials", "100",
                                 "--max-cycles", "10"});
    REQUIRE(fixed.code == 0);
    CHECK(fixed.err.find("delta_t=fixed at t_star") != std::string::npos);
}

TEST_CASE("cli: verify") {
    const Result list = invoke({"verify", "--list"});
    CHECK(list.code == 0);
    CHECK(list.out.find("hermiticity") != std::string::npos);

    const Result quick = invoke({"verify", "--draws", "10"});
    CHECK(quick.code == 0);
    CHECK(quick.out.find("all checks passed") != std::string::npos);

    const Result empty = invoke({"verify", "--checks", ""});
    CHECK(empty.code == 1);
    CHECK(empty.err.find("no checks selected") != std::string::npos);

    const Result unknown = invoke({"verify", "--checks", "nonsense"});
    CHECK(unknown.code == 1);

    const Result injected = invoke({"verify", "--checks", "hermiticity", "--draws", "5", "--inject-non-hermitian"});
    CHECK(injected.code == 2);
    CHECK(injected.out.find("FAIL hermiticity") != std::string::npos);
}
