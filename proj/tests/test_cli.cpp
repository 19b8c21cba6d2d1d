#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "json.hpp"

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

RunResult run(const std::string& args) {
    const std::string cmd =
        std::string(SIDEBAND_SIM_BIN) + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp("cli_stdout.txt");
    r.err = slurp("cli_stderr.txt");
    return r;
}

// Parses the numeric part of a sweep CSV: returns rows of the named column.
std::vector<std::pair<double, double>> column(const std::string& csv, const std::string& name) {
    std::istringstream in(csv);
    std::string line;
    int col = -1;
    std::vector<std::pair<double, double>> out;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (col < 0) {
            for (size_t i = 0; i < cells.size(); ++i)
                if (cells[i] == name) col = int(i);
            REQUIRE(col > 0);
            continue;
        }
        out.emplace_back(std::stod(cells[0]), std::stod(cells[size_t(col)]));
    }
    return out;
}

const char* kBeamSplitter = R"([mode_a]
frequency = 1000.0
decay_rate = 1.0
bath_occupation = 0.0

[mode_b]
frequency = 1.0
decay_rate = 0.1
bath_occupation = 10.0

[drive]
amplitude = 0.5
drive_frequency = 999.0

[coupling]
kind = beam_splitter
)";

std::string with(const std::string& base, const std::string& from, const std::string& to) {
    std::string s = base;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    s.replace(pos, from.size(), to);
    return s;
}

}  // namespace

TEST_CASE("steady: decoupled config is flagged") {
    write_file("cfg_decoupled.ini", with(kBeamSplitter, "amplitude = 0.5", "amplitude = 0.0"));
    const auto r = run("--config cfg_decoupled.ini steady");
    CHECK(r.code == 0);
    CHECK(r.out.find("no cooling (decoupled)") != std::string::npos);
    CHECK(r.out.find("xi = 0") != std::string::npos);
}

TEST_CASE("steady: rate and closed form agree in the report") {
    write_file("cfg_bs.ini", kBeamSplitter);
    const auto r = run("--config cfg_bs.ini --out steady.json steady --engines closed_form,rate");
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(slurp("steady.json"));
    CHECK(std::abs(double(j["closed_form"]["n_b"]) - double(j["rate"]["n_b"])) < 1e-10);
    CHECK(j["rwa_pass"].get<bool>());
}

TEST_CASE("invalid config: exit 2 naming the field") {
    write_file("cfg_bad.ini", with(kBeamSplitter, "decay_rate = 1.0", "decay_rate = -1.0"));
    const auto r = run("--config cfg_bad.ini steady");
    CHECK(r.code == 2);
    CHECK(r.err.find("mode_a.decay_rate") != std::string::npos);
    CHECK(run("--config no_such_file.ini steady").code == 2);
}

TEST_CASE("sweep: cooling optimum at Delta = omega_b") {
    write_file("cfg_bs.ini", kBeamSplitter);
    // Delta in [omega_b - 5 gamma_a, omega_b + 5 gamma_a], grid step 0.5.
    const auto r = run("--config cfg_bs.ini --out sweep.csv sweep --param delta "
                       "--start -4 --stop 6 --points 21 --engines closed_form,rate");
    REQUIRE(r.code == 0);
    const auto rows = column(slurp("sweep.csv"), "closed_form_n_b");
    REQUIRE(rows.size() == 21);
    double best_param = 0.0, best = 1e300;
    for (auto [p, v] : rows)
        if (v < best) {
            best = v;
            best_param = p;
        }
    CHECK(std::abs(best_param - 1.0) <= 0.5);  // within one grid step of omega_b

    // Rate column must agree everywhere.
    const auto rate_rows = column(slurp("sweep.csv"), "rate_n_b");
    for (size_t i = 0; i < rows.size(); ++i)
        CHECK(std::abs(rows[i].second - rate_rows[i].second) < 1e-9);
}

TEST_CASE("sweep: Omega = 0 keeps n_b at the bath value") {
    write_file("cfg_decoupled.ini", with(kBeamSplitter, "amplitude = 0.5", "amplitude = 0.0"));
    const auto r = run("--config cfg_decoupled.ini --out sweep0.csv sweep --param delta "
                       "--start -2 --stop 2 --points 5 --engines closed_form");
    REQUIRE(r.code == 0);
    for (auto [p, v] : column(slurp("sweep0.csv"), "closed_form_n_b"))
        CHECK(v == 10.0);
}

TEST_CASE("sweep determinism: byte-identical CSV, independent of threads") {
    write_file("cfg_bs.ini", kBeamSplitter);
    const std::string args = "--config cfg_bs.ini --seed 17 sweep --param delta --start 0 "
                             "--stop 2 --points 5 --engines closed_form,rate,langevin";
    REQUIRE(run("--threads 1 --out det1.csv " + args).code == 0);
    REQUIRE(run("--threads 1 --out det2.csv " + args).code == 0);
    REQUIRE(run("--threads 3 --out det3.csv " + args).code == 0);
    const std::string a = slurp("det1.csv");
    CHECK(a == slurp("det2.csv"));
    CHECK(a == slurp("det3.csv"));
    CHECK(a.find("langevin_n_b") != std::string::npos);
    CHECK(a.find("# seed: 17") != std::string::npos);
}

TEST_CASE("sweep: unsupported engine per point fills the reason column, exit 3") {
    write_file("cfg_full.ini", with(kBeamSplitter, "kind = beam_splitter", "kind = full"));
    const auto r = run("--config cfg_full.ini --out fail.csv sweep --param delta "
                       "--start 0 --stop 2 --points 3 --engines rate");
    CHECK(r.code == 3);
    const std::string csv = slurp("fail.csv");
    CHECK(csv.find("rate:") != std::string::npos);
    CHECK(csv.find("beam-splitter") != std::string::npos);
}

TEST_CASE("lindblad subcommand: capacity exit code") {
    write_file("cfg_hot.ini", with(kBeamSplitter, "bath_occupation = 10.0",
                                   "bath_occupation = 10000.0"));
    const auto r = run("--config cfg_hot.ini lindblad");
    CHECK(r.code == 4);
    CHECK(r.err.find("capacity") != std::string::npos);
}

TEST_CASE("lindblad subcommand: fixed dims JSON report") {
    write_file("cfg_cool.ini", with(kBeamSplitter, "bath_occupation = 10.0",
                                    "bath_occupation = 0.5"));
    const auto r = run("--config cfg_cool.ini --out lb.json lindblad --dim-a 4 --dim-b 8 "
                       "--method null_space");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(slurp("lb.json"));
    CHECK(double(j["trace_deviation"]) < 1e-10);
    CHECK(double(j["hermiticity_deviation"]) < 1e-10);
    CHECK(double(j["min_eigenvalue"]) >= -1e-8);
    CHECK(double(j["residual"]) < 1e-10);
    CHECK(j["dim_b"] == 8);
    CHECK(double(j["n_b"]) < 0.5);  // cooled below the bath occupation
}

TEST_CASE("evolve subcommand emits a trajectory CSV") {
    write_file("cfg_bs.ini", kBeamSplitter);
    const auto r = run("--config cfg_bs.ini --out evolve.csv evolve --t-final 5 --n-a0 0 --n-b0 10");
    REQUIRE(r.code == 0);
    const std::string csv = slurp("evolve.csv");
    CHECK(csv.find("t,n_a,n_b,re_sigma,im_sigma") != std::string::npos);
    const auto rows = column(csv, "n_b");
    REQUIRE(rows.size() > 5);
    CHECK(rows.front().first == 0.0);
    CHECK(rows.front().second == 10.0);
    CHECK(rows.back().first == 5.0);
    CHECK(rows.back().second < 10.0);  // cooling
}

TEST_CASE("ensemble subcommand reports the bosonization deviation") {
    const auto r = run("--out ens.csv ensemble --n-atoms 4 --ma 0 --nb 1 --delta 1 --omega-b 1 "
                       "--omega 0.5 --t-final 10 --points 51");
    REQUIRE(r.code == 0);
    const std::string csv = slurp("ens.csv");
    const auto pos = csv.find("# max_deviation: ");
    REQUIRE(pos != std::string::npos);
    const double dev = std::stod(csv.substr(pos + 17));
    CHECK(dev < 1e-10);
    CHECK(column(csv, "n_b_atomic").size() == 51);
}

TEST_CASE("linearize subcommand") {
    const std::string gen = with(std::string(kBeamSplitter) + "g_prime = 0.01\nf_drive = 0.5\n"
                                                              "f_spec = number\n",
                                 "kind = beam_splitter", "kind = generalized");
    // Reference point needs omega_b = 0.1 and Delta0 = 1.
    const std::string cfg = with(gen, "frequency = 1.0\n", "frequency = 0.1\n");
    write_file("cfg_gen.ini", cfg);
    const auto r = run("--config cfg_gen.ini --out lin.json linearize");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(slurp("lin.json"));
    CHECK(std::abs(double(j["alpha"]) - (-0.50025)) < 1e-5);
    CHECK(std::abs(double(j["beta"]) - (-0.025025)) < 1e-5);
    CHECK(std::abs(double(j["delta_eff"]) - 0.99950) < 1e-5);
    CHECK(std::abs(double(j["g_eff"]) - (-0.0050025)) < 1e-6);
    CHECK(double(j["expansion_linear_residual"]) < 1e-8);
    CHECK(double(j["expansion_quadratic_mismatch"]) < 1e-6);
    CHECK_FALSE(j["multistable"].get<bool>());

    // Multistable cubic: all roots listed, default marked, exit 0.
    const std::string multi =
        with(with(cfg, "g_prime = 0.01", "g_prime = 1.0"),
             "f_drive = 0.5", "f_drive = 0.1");
    write_file("cfg_multi.ini", with(multi, "frequency = 0.1\n", "frequency = 1.0\n"));
    const auto m = run("--config cfg_multi.ini --out multi.json linearize");
    REQUIRE(m.code == 0);
    const auto jm = nlohmann::json::parse(slurp("multi.json"));
    CHECK(jm["multistable"].get<bool>());
    CHECK(jm["roots"].size() == 3);
    int defaults = 0;
    for (const auto& root : jm["roots"]) defaults += root["default"].get<bool>() ? 1 : 0;
    CHECK(defaults == 1);
    CHECK(m.out.find("[default]") != std::string::npos);

    // Non-generalized config is a usage error.
    write_file("cfg_bs.ini", kBeamSplitter);
    CHECK(run("--config cfg_bs.ini linearize").code == 1);
}
