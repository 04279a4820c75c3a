// test_cli.cpp — configuration, CSV output and command behaviour of the CLI

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "qosc/errors.hpp"
#include "qosc/specialfns.hpp"

using namespace qosc;
using namespace qosc::cli;

namespace {

ScenarioConfig scenario(const std::string& name, const std::vector<std::string>& sets = {}) {
    return resolve(merge(name, std::nullopt, sets));
}

RunOptions run_options(const std::string& command, int jobs = 1) {
    RunOptions r;
    r.command = command;
    r.jobs = jobs;
    r.build_id = "test";
    return r;
}

std::string render(const CsvTable& table) {
    std::ostringstream out;
    table.write(out);
    return out.str();
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    }
    return lines;
}

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "qosc_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_exe(const std::string& args) {
    const std::string cmd = std::string(QOSC_EXE) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("config text grammar") {
    const KeyValues kv = parse_config_text("# comment\n\n delta = 0.3  # trailing\ng=1\n");
    CHECK(kv.size() == 2);
    CHECK(kv.at("delta") == "0.3");
    CHECK(kv.at("g") == "1");
    CHECK_THROWS_AS(parse_config_text("nonsense = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("delta 0.3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("delta =\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("g = 1\ng = 2\n"), ConfigError);
    CHECK(parse_assignment(" k_max = 7 ") == std::pair<std::string, std::string>{"k_max", "7"});
    CHECK_THROWS_AS(parse_assignment("k_max"), ConfigError);
    CHECK_THROWS_AS(parse_assignment("bogus=1"), ConfigError);
    CHECK_THROWS_AS(parse_config_file("/nonexistent/qosc.cfg"), ConfigError);
}

TEST_CASE("precedence: preset < config file < overrides") {
    const auto path = scratch_dir() / "precedence.cfg";
    std::ofstream(path) << "g = 0.7\ndelta = 0.25\n";
    const KeyValues kv = merge(std::string("fig4b"), path.string(), {"delta=0.3"});
    CHECK(kv.at("k_max") == "16");  // preset
    CHECK(kv.at("g") == "0.7");     // file beats preset
    CHECK(kv.at("delta") == "0.3"); // override beats file
    CHECK(kv.at("l_max") == "40");  // default
    CHECK_THROWS_AS(merge(std::string("fig9"), std::nullopt, {}), ConfigError);
}

TEST_CASE("unit normalization") {
    const ScenarioConfig c =
        resolve(merge(std::nullopt, std::nullopt,
                      {"units=omega_ex", "omega_ex=2", "Omega=3", "g=0.5", "epsilon=-1", "t_end=10", "sweep.stop=4"}));
    CHECK(c.unit_frequency == 2.0);
    CHECK(c.params.omega_ex == 1.0);
    CHECK(c.params.Omega == 1.5);
    CHECK(c.params.g == 0.25);
    CHECK(c.params.epsilon == -0.5);
    CHECK(*c.t_end == 20.0);
    CHECK(*c.sweep_stop == 2.0);
    CHECK(c.trunc.denom_tol == doctest::Approx(1e-6));

    const ScenarioConfig o = scenario("fig1", {"units=Omega"});
    CHECK(o.params.Omega == 1.0);
    CHECK(o.params.omega_ex == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("resolve rejects bad settings") {
    auto bad = [](std::vector<std::string> sets) { return resolve(merge(std::nullopt, std::nullopt, sets)); };
    CHECK_THROWS_AS(bad({"t_end=0"}), ConfigError);
    CHECK_THROWS_AS(bad({"sweep.steps=1"}), ConfigError);
    CHECK_THROWS_AS(bad({"delta=-1"}), ConfigError);
    CHECK_THROWS_AS(bad({"Omega=0"}), ConfigError);
    CHECK_THROWS_AS(bad({"k_max=x"}), ConfigError);
    CHECK_THROWS_AS(bad({"theta=0"}), ConfigError);
    CHECK_THROWS_AS(bad({"window=triangle"}), ConfigError);
    CHECK_THROWS_AS(bad({"units=hbar"}), ConfigError);
    CHECK_THROWS_AS(bad({"convention=other"}), ConfigError);
    CHECK_THROWS_AS(bad({"second_order=maybe"}), ConfigError);
    CHECK_THROWS_AS(bad({"L_max=30", "k_max=6"}), ConfigError);
    CHECK_NOTHROW(bad({"theta=inf"}));
    const ScenarioConfig c = bad({"sweep.variable=eps"});
    CHECK_THROWS_AS(resolve_sweep(c, "g", 0.0, 1.0, 3), ConfigError);
    CHECK_THROWS_AS(resolve_sweep(bad({"sweep.start=2", "sweep.stop=1"}), "eps", 0.0, 1.0, 3), ConfigError);
}

TEST_CASE("every preset resolves") {
    for (const std::string& name : scenario_names()) CHECK_NOTHROW(scenario(name));
    CHECK(scenario("fig5").params.A == doctest::Approx(special::kBesselJ0FirstZero * 5.3).epsilon(1e-15));
    CHECK_FALSE(scenario("fig3").vanvleck.second_order);
    CHECK(scenario("fig1").vanvleck.second_order);
    CHECK(scenario("fig1").trunc.k_max == 6);
}

TEST_CASE("CSV formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::strtod(format_double(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
    CsvTable t({"a", "b"});
    t.meta("note", "x");
    t.row(std::vector<double>{1.0, 2.5});
    CHECK_THROWS_AS(t.row(std::vector<double>{1.0}), std::logic_error);
    CHECK(render(t) == "# schema: qosc-csv/1\n# note: x\na,b\n1,2.5\n");
    CHECK(spectrum_path("out/run.csv") == "out/run_spectrum.csv");
    CHECK(spectrum_path("run") == "run_spectrum.csv");
}

TEST_CASE("laguerre_roots") {
    const auto r1 = laguerre_roots(1, 0, 10.0);
    REQUIRE(r1.size() == 1);
    CHECK(r1[0] == doctest::Approx(1.0).epsilon(1e-14));
    const auto r2 = laguerre_roots(2, 0, 10.0);
    REQUIRE(r2.size() == 2);
    CHECK(r2[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-13));
    CHECK(r2[1] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-13));
    for (int K = 1; K <= 6; ++K) {
        for (int L : {0, 2}) {
            const auto roots = laguerre_roots(K, L, 100.0);
            CHECK(roots.size() == static_cast<std::size_t>(K));
            for (double a : roots) CHECK(std::abs(std::assoc_laguerre(K, L, a)) < 1e-9);
        }
    }
    CHECK(laguerre_roots(0, 0, 10.0).empty());
    CHECK(laguerre_roots(3, 0, 0.3).empty());
}

TEST_CASE("fold and nearest_doublet") {
    for (double v : {-3.7, -0.5, 0.0, 0.49, 0.5, 12.3}) {
        const double f = fold(v, 1.0);
        CHECK(f >= -0.5);
        CHECK(f < 0.5);
        CHECK(std::abs(std::remainder(v - f, 1.0)) < 1e-12);
    }
    SystemParams p = scenario("fig1").params;
    p.epsilon = 1.02;
    CHECK(nearest_doublet(p, 4, 2) == ResonanceIndex{1, 0, 0, 0});
    p.epsilon = 1.0 + std::sqrt(2.0);
    CHECK(nearest_doublet(p, 4, 2) == ResonanceIndex{1, -1, 0, 0});
    p.epsilon = 2.0 - std::sqrt(2.0);
    CHECK(nearest_doublet(p, 4, 2) == ResonanceIndex{2, 1, 0, 0});
}

TEST_CASE("Delta = 0: analytic levels equal the reference ladder") {
    ScenarioConfig c = scenario("fig1", {"delta=0"});
    for (double eps : {0.0, 0.37, 1.0 + std::sqrt(2.0), 2.6}) {
        SystemParams p = c.params;
        p.epsilon = eps;
        const ResonanceIndex idx = nearest_doublet(p, c.m_span, c.L_max);
        const auto a = analytic_levels(p, c.trunc, idx.m, idx.L, c.vanvleck);
        const auto r = reference_levels(p, c.trunc.k_max);
        REQUIRE(a.size() == r.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - r[i]) < 1e-12);
    }
}

TEST_CASE("analytic levels of an L < 0 doublet match the Sambe oracle") {
    const ScenarioConfig c = scenario("fig1", {"k_max=4"});
    SystemParams p = c.params;
    p.epsilon = 1.0 + std::sqrt(2.0) + 0.01;
    const ResonanceIndex idx = nearest_doublet(p, c.m_span, c.L_max);
    REQUIRE(idx.L == -1);
    const auto a = analytic_levels(p, c.trunc, idx.m, idx.L, c.vanvleck);
    Truncation nt = c.trunc;
    nt.k_max = 10;
    const auto n = numeric_levels(p, nt, 1e-6, 400);
    // Every analytic level of the low-K states has a numeric partner.
    const auto low = analytic_levels(p, [&] { Truncation t = c.trunc; t.k_max = 2; return t; }(), idx.m, idx.L,
                                     c.vanvleck);
    for (double v : low) {
        double best = 1.0;
        for (double w : n) {
            if (!std::isnan(w)) best = std::min(best, std::abs(fold(v - w, p.omega_ex)));
        }
        CHECK(best < 1e-2);
    }
    CHECK(a.size() == 10);
}

TEST_CASE("spectrum-eps table: shape, sweep order and determinism across jobs") {
    const ScenarioConfig c = scenario("fig1", {"numeric=false", "sweep.steps=7", "sweep.stop=2.5"});
    const CsvTable one = spectrum_eps_table(c, run_options("spectrum-eps", 1));
    const CsvTable many = spectrum_eps_table(c, run_options("spectrum-eps", 4));
    CHECK(render(one) == render(many));
    const auto lines = data_lines(render(one));
    REQUIRE(lines.size() == 8);
    const auto header = split(lines[0]);
    CHECK(header.size() == 3 + 2 * 2 * 7);
    CHECK(header[0] == "eps");
    double last = -INFINITY;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i]);
        CHECK(cells.size() == header.size());
        const double eps = std::stod(cells[0]);
        CHECK(eps > last);
        last = eps;
    }
    const std::string text = render(one);
    CHECK(text.rfind("# schema: qosc-csv/1\n# command: spectrum-eps\n# build: test\n", 0) == 0);
    CHECK(text.find("# config: k_max = 6") != std::string::npos);
    CHECK(text.find("# units: omega_ex") != std::string::npos);
    CHECK(text.find("# warning:") == std::string::npos);
}

TEST_CASE("spectrum-eps with the numeric oracle") {
    const ScenarioConfig c =
        scenario("fig1", {"k_max=3", "sweep.start=0.95", "sweep.stop=1.05", "sweep.steps=3", "l_max=14"});
    const auto lines = data_lines(render(spectrum_eps_table(c, run_options("spectrum-eps"))));
    REQUIRE(lines.size() == 4);
    const auto header = split(lines[0]);
    CHECK(header.size() == 3 + 3 * 8);
    const auto first_numeric = std::find(header.begin(), header.end(), "numeric_0") - header.begin();
    REQUIRE(first_numeric == 3 + 8);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split(lines[r]);
        CHECK(cells[1] == "1");
        CHECK(cells[2] == "0");
        for (int j = 0; j < 8; ++j) {
            const double v = std::stod(cells[static_cast<std::size_t>(first_numeric + j)]);
            CHECK(v >= -0.5);
            CHECK(v < 0.5);
        }
    }
}

TEST_CASE("spectrum-g: one block per drive amplitude, g = 0 row is the bare driven qubit") {
    const ScenarioConfig c = scenario("fig2", {"numeric=false", "sweep.steps=4", "k_max=3"});
    const auto lines = data_lines(render(spectrum_g_table(c, run_options("spectrum-g", 2))));
    REQUIRE(lines.size() == 1 + 2 * 4);
    CHECK(split(lines[1])[0] == "8");
    CHECK(split(lines[5])[0] == "12.74");
    // At g = 0 and eps = 0 the K = 0 doublet splits by |Delta_0|.
    const auto cells = split(lines[1]);
    CHECK(std::stod(cells[1]) == 0.0);
    std::vector<double> analytic;
    for (int i = 0; i < 8; ++i) analytic.push_back(std::stod(cells[static_cast<std::size_t>(4 + i)]));
    const double d0 = std::abs(special::dressed_delta(0, c.params.delta, 8.0, c.params.omega_ex));
    bool found = false;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        for (std::size_t j = i + 1; j < analytic.size(); ++j) {
            if (std::abs(std::abs(analytic[j] - analytic[i]) - d0) < 1e-12) found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("gaps: Laguerre zeros, K = 0 column and the CDT point") {
    const ScenarioConfig c = scenario("fig3", {"sweep.steps=31"});
    const std::string text = render(gaps_table(c, run_options("gaps")));
    CHECK(text.find("# laguerre_zero: K=1 alpha=1 g=0.5\n") != std::string::npos);
    const auto lines = data_lines(text);
    REQUIRE(lines.size() == 32);
    const double d0 = std::abs(special::dressed_delta(0, 0.4, 8.0, 5.3));
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split(lines[r]);
        REQUIRE(cells.size() == 10);
        const double alpha = std::stod(cells[2]);
        CHECK(std::stod(cells[4]) == doctest::Approx(d0 * std::exp(-0.5 * alpha)).epsilon(1e-12));
        if (std::stod(cells[0]) == 0.5) {
            CHECK(std::stod(cells[5]) == 0.0);
            CHECK(cells[9] == "1");
        }
    }

    const ScenarioConfig cdt = scenario("fig3", {"A=12.74", "second_order=true", "delta=1", "sweep.steps=25"});
    const auto cdt_lines = data_lines(render(gaps_table(cdt, run_options("gaps"))));
    for (std::size_t r = 1; r < cdt_lines.size(); ++r) {
        const auto cells = split(cdt_lines[r]);
        for (int K = 0; K <= 4; ++K) CHECK(std::stod(cells[static_cast<std::size_t>(4 + K)]) < 1e-3);
    }
}

TEST_CASE("commensurability warnings") {
    const auto w = config_warnings(scenario("fig3"));
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("10/53") != std::string::npos);
    CHECK(w[0].find("order >= 10") != std::string::npos);
    CHECK(config_warnings(scenario("fig1")).empty());
    CHECK(config_warnings(scenario("fig3", {"p_max=60", "P_max=60"})).size() == 2);
    const std::string text = render(gaps_table(scenario("fig3", {"sweep.steps=3"}), run_options("gaps")));
    CHECK(text.find("# warning: Omega/omega_ex = 10/53") != std::string::npos);
}

TEST_CASE("validate report") {
    const std::string r = validate_report(scenario("fig4a", {"numeric=false"}));
    CHECK(r.find("commensurability: Omega/omega_ex = 10/53, affected order >= 10") != std::string::npos);
    CHECK(r.find("nearest doublet: m=0 L=0") != std::string::npos);
    CHECK(r.find("p_max and P_max doubled") != std::string::npos);
    const std::string s = validate_report(scenario("fig1", {"k_max=3", "K_plot=2", "l_max=12"}));
    CHECK(s.find("commensurability: none") != std::string::npos);
    CHECK(s.find("l_max doubled: max delta") != std::string::npos);
    CHECK(s.find("status: ok\n") != std::string::npos);
}

TEST_CASE("dynamics tables: CDT scenario is flat, peaks are listed") {
    const ScenarioConfig c = scenario("fig5", {"numeric=false", "samples=512"});
    const DynamicsTables t = dynamics_tables(c, run_options("dynamics"));
    const auto lines = data_lines(render(t.series));
    REQUIRE(lines.size() == 513);
    CHECK(lines[0] == "t,P_analytic");
    CHECK(std::stod(split(lines[1])[0]) == 0.0);
    for (std::size_t i = 1; i < lines.size(); ++i) CHECK(std::abs(std::stod(split(lines[i])[1]) - 1.0) < 1e-6);
    CHECK(data_lines(render(t.spectrum)).size() == 1 + 257);

    const ScenarioConfig b = scenario("fig4b", {"numeric=false", "samples=1024"});
    const std::string text = render(dynamics_tables(b, run_options("dynamics")).spectrum);
    CHECK(text.find("# predicted_peak:") != std::string::npos);
    CHECK(text.find("label=Omega^0") != std::string::npos);
    CHECK(text.find("# peak_analytic:") != std::string::npos);
}

TEST_CASE("executable: exit codes and byte-identical output") {
    const auto dir = scratch_dir();
    const std::string a = (dir / "a.csv").string();
    const std::string b = (dir / "b.csv").string();
    const std::string args = "gaps --scenario fig3 --set sweep.steps=41 --set K_plot=3";
    CHECK(run_exe(args + " --jobs 1 --out " + a) == 0);
    CHECK(run_exe(args + " --jobs 3 --out " + b) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK_FALSE(slurp(a).empty());

    CHECK(run_exe("gaps --set bogus=1 --out " + a) == 2);
    CHECK(run_exe("gaps --set t_end=0 --out " + a) == 2);
    CHECK(run_exe("dynamics --scenario fig4a --set m=1 --set numeric=false --out " + a) == 2);
    CHECK(run_exe("dynamics --scenario fig4c --set k_max=1 --set L_max=1 --set numeric=false --out " + a) == 3);
    CHECK(run_exe("validate --scenario fig3 --set numeric=false") == 0);
    CHECK(run_exe("frobnicate") == 2);
    CHECK(run_exe("gaps --jobs 0") == 2);

    const std::string dyn = (dir / "dyn.csv").string();
    CHECK(run_exe("dynamics --scenario fig4a --set numeric=false --set samples=256 --out " + dyn) == 0);
    CHECK(std::filesystem::exists(dir / "dyn_spectrum.csv"));
}

} // TEST_SUITE
