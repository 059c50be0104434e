#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nflow/cli.hpp"
#include "nflow/errors.hpp"
#include "nflow/io.hpp"

using namespace nflow;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "nflow");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("nflow_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("round-trip number formatting") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("u0 and rational parsing") {
    const InitialData d = parse_u0("2 1:0.5 3:-0.1");
    CHECK(d.constant == 2.0);
    REQUIRE(d.modes.size() == 2);
    CHECK(d.modes[1].first == 3);
    CHECK(d.modes[1].second == -0.1);
    CHECK_THROWS_AS(parse_u0("1:0.5"), ConfigError);
    CHECK_THROWS_AS(parse_u0("2 x:1"), ConfigError);
    CHECK(parse_rational("1/2") == 0.5);
    CHECK(parse_rational("2") == 2.0);
    CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
}

TEST_CASE("config parsing") {
    std::istringstream in(
        "# comment\n"
        "experiment = demo\n"
        "a_over_pi = 2   # trailing\n"
        "p = 1.5\n"
        "u0 = 1 1:0.5\n"
        "project_conservation = true\n"
        "\n");
    const RunConfig c = parse_config(in);
    CHECK(c.experiment == "demo");
    CHECK(c.length() == Approx(2.0 * kPi));
    CHECK(c.solver.p == 1.5);
    CHECK(c.solver.project_conservation);
    CHECK(c.u0.modes.size() == 1);

    std::istringstream bad("frobnicate = 3\n");
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    std::istringstream both("a = 1\na_over_pi = 1\n");
    CHECK_THROWS_AS(parse_config(both).length(), ConfigError);
    std::istringstream none("p = 2\n");
    CHECK_THROWS_AS(parse_config(none).length(), ConfigError);
}

TEST_CASE("trace rows") {
    DiagnosticsRecord r;
    r.step = 3;
    r.t = 0.5;
    r.energy = -1.25;
    const std::string row = trace_row(r);
    CHECK(row.rfind("3,0.5,0,-1.25,", 0) == 0);
    CHECK(row.back() == ',');  // closure empty
    std::ostringstream out;
    write_trace(out, {r});
    CHECK(out.str().rfind(std::string(kTraceHeader) + "\n", 0) == 0);
}

TEST_CASE("steady state json") {
    const auto j = to_json(SteadyState{CosineState{0.5, 2.0}});
    CHECK(j.dump() == R"({"kind":"cosine","A":0.5,"B":2.0,"phase":0.0})");
}

TEST_CASE("output dir override") {
    RunConfig c;
    c.output_dir = "here";
    ::unsetenv("NFLOW_OUTPUT_DIR");
    CHECK(resolve_output_dir(c) == "here");
    ::setenv("NFLOW_OUTPUT_DIR", "/tmp/elsewhere", 1);
    CHECK(resolve_output_dir(c) == "/tmp/elsewhere");
    ::unsetenv("NFLOW_OUTPUT_DIR");
}

TEST_CASE("cli simulate writes trace and summary") {
    const fs::path d = scratch_dir("sim");
    const fs::path cfg = d / "run.cfg";
    std::ofstream(cfg) << "experiment = conv\na = 1\nn = 33\np = 2\nu0 = 2 1:0.5\noutput_dir = "
                       << d.string() << "\n";
    CHECK(cli({"simulate", "--config", cfg.string()}) == kExitOk);
    const auto summary = nlohmann::json::parse(slurp(d / "conv" / "summary.json"));
    CHECK(summary["outcome"] == "converged");
    CHECK(summary["fitted"]["kind"] == "constant");
    CHECK(summary["fitted"]["B"].get<double>() == Approx(std::sqrt(3.75)).epsilon(1e-6));
    CHECK(summary["I_relative_drift"].get<double>() <= 1e-6);
    const std::string trace = slurp(d / "conv" / "trace.csv");
    CHECK(trace.rfind(std::string(kTraceHeader) + "\n", 0) == 0);

    // Flags override the file, reruns are byte-identical.
    CHECK(cli({"simulate", "--config", cfg.string(), "--experiment", "again"}) == kExitOk);
    CHECK(slurp(d / "again" / "trace.csv") == trace);
}

TEST_CASE("cli simulate blowup and errors") {
    const fs::path d = scratch_dir("blow");
    CHECK(cli({"simulate", "--a-over-pi", "2", "--p", "1.5", "--u0", "1 1:0.5", "--n", "33",
               "--experiment", "b", "--output-dir", d.string()}) == kExitOk);
    CHECK(nlohmann::json::parse(slurp(d / "b" / "summary.json"))["outcome"] == "blowup");

    CHECK(cli({"simulate", "--a", "1", "--p", "2", "--u0", "0.3 1:0.5", "--output-dir", d.string()}) ==
          kExitConfig);
    CHECK(cli({"simulate", "--config", (d / "missing.cfg").string()}) == kExitConfig);
    CHECK(cli({"simulate", "--a", "1", "--p", "0.5", "--u0", "1"}) == kExitConfig);
}

TEST_CASE("cli subcommands") {
    CHECK(cli({"predict", "--a", "1", "--p", "2", "--u0", "2"}) == kExitOk);
    CHECK(cli({"steady", "--a-over-pi", "1", "--p", "2", "--A", "1", "--I0", "3.14159265"}) == kExitOk);
    CHECK(cli({"steady", "--a", "1", "--p", "2", "--A", "1", "--I0", "3"}) == kExitConfig);
    CHECK(cli({"steady", "--a-over-pi", "1", "--p", "1.25", "--A", "5", "--I0", "3"}) == kExitRuntime);
    CHECK(cli({"check-ls", "--a", "3.14159265", "--trials", "1000", "--seed", "7"}) == kExitOk);
    CHECK(cli({"predict", "--a", "1"}) == kExitConfig);

    const fs::path d = scratch_dir("curve");
    CHECK(cli({"curve", "--a-over-pi", "1", "--p", "2", "--u0", "1", "--output", (d / "c.csv").string()}) ==
          kExitOk);
    const std::string csv = slurp(d / "c.csv");
    CHECK(csv.rfind("x,y\n", 0) == 0);
    CHECK(cli({"curve", "--a", "1", "--u0", "1", "--output", (d / "d.csv").string()}) == kExitRuntime);

    CHECK(cli({"sweep", "--p", "2", "--a", "1,4", "--amp", "0.3", "--n", "33", "--t-max", "20",
               "--output-dir", d.string()}) == kExitOk);
    const std::string sweep = slurp(d / "sweep.csv");
    CHECK(sweep.rfind("p,a,amp,E0,outcome,t_end,kind,A,B,error\n", 0) == 0);
    CHECK(sweep.find("blowup") != std::string::npos);
    CHECK(sweep.find("converged") != std::string::npos);
}
