#include "nflow/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "nflow/diagnostics.hpp"
#include "nflow/errors.hpp"
#include "nflow/experiments.hpp"
#include "nflow/io.hpp"

namespace nflow {

namespace fs = std::filesystem;

namespace {

std::string kebab(std::string s) {
    for (char& c : s) {
        if (c == '_') c = '-';
    }
    return s;
}

struct DomainFlags {
    std::optional<double> a;
    std::optional<std::string> a_over_pi;

    void attach(CLI::App* cmd) {
        cmd->add_option("--a", a, "domain length");
        cmd->add_option("--a-over-pi", a_over_pi, "domain length as a rational multiple of pi");
    }
    double length() const {
        RunConfig c;
        c.a = a;
        c.a_over_pi = a_over_pi;
        return c.length();
    }
};

std::vector<double> parse_list(const std::string& name, const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        double x = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
            throw ConfigError("--" + name + ": bad list entry '" + tok + "'");
        }
        out.push_back(x);
    }
    if (out.empty()) throw ConfigError("--" + name + ": empty list");
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << content;
}

int cmd_simulate(const std::string& config_path, const std::map<std::string, std::string>& flags) {
    RunConfig cfg;
    std::optional<Field> u0;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        for (const auto& [k, v] : flags) apply_config_key(cfg, k, v);
        cfg.solver.validate();
        u0 = cfg.u0.build(make_grid(cfg.length(), cfg.n));
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    try {
        const SimOutcome out = simulate(*u0, cfg.solver);
        const fs::path dir = fs::path(resolve_output_dir(cfg)) / cfg.experiment;
        std::ostringstream trace;
        write_trace(trace, out.trace);
        write_file(dir / "trace.csv", trace.str());
        const auto summary = summary_json(cfg, *u0, out);
        write_file(dir / "summary.json", summary.dump(2) + "\n");
        std::cout << outcome_name(out.tag) << ' ' << (dir / "summary.json").string() << '\n';
    } catch (const Error& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Nonlocal degenerate flow solver"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "integrate one trajectory");
    std::string config_path;
    sim->add_option("--config", config_path, "flat key = value config file");
    std::map<std::string, std::string> sim_values;
    for (const auto& key : config_keys()) {
        sim->add_option_function<std::string>(
            "--" + kebab(key), [&sim_values, key](const std::string& v) { sim_values[key] = v; },
            "overrides config key " + key);
    }

    // predict
    auto* pred = app.add_subcommand("predict", "print the predicted limit of u0");
    DomainFlags pred_dom;
    pred_dom.attach(pred);
    double pred_p = 2.0;
    std::string pred_u0;
    int pred_n = 129;
    pred->add_option("--p", pred_p)->required();
    pred->add_option("--u0", pred_u0, "\"c0 k:ck ...\"")->required();
    pred->add_option("--n", pred_n);

    // steady
    auto* st = app.add_subcommand("steady", "classify steady states, optionally solve for B");
    DomainFlags st_dom;
    st_dom.attach(st);
    double st_p = 2.0;
    std::optional<double> st_A, st_I0;
    st->add_option("--p", st_p)->required();
    st->add_option("--A", st_A, "amplitude");
    st->add_option("--I0", st_I0, "conserved integral");

    // sweep
    auto* sw = app.add_subcommand("sweep", "batch over (p, a, amp) with u0 = 1 + amp cos(pi x / a)");
    std::string sw_p = "1.5,2", sw_a = "1,4", sw_amp = "0.2,0.5", sw_out = "runs/sweep";
    int sw_n = 129;
    unsigned sw_workers = 0;
    double sw_tmax = 100.0;
    sw->add_option("--p", sw_p, "comma-separated list");
    sw->add_option("--a", sw_a, "comma-separated list");
    sw->add_option("--amp", sw_amp, "comma-separated list");
    sw->add_option("--n", sw_n);
    sw->add_option("--workers", sw_workers);
    sw->add_option("--t-max", sw_tmax);
    sw->add_option("--output-dir", sw_out);

    // check-ls
    auto* ls = app.add_subcommand("check-ls", "randomised check of the spectral inequality");
    std::vector<double> ls_a;
    int ls_trials = 1000, ls_n = 129;
    std::uint64_t ls_seed = 7;
    ls->add_option("--a", ls_a, "domain lengths")->required();
    ls->add_option("--trials", ls_trials);
    ls->add_option("--seed", ls_seed);
    ls->add_option("--n", ls_n);

    // curve
    auto* cv = app.add_subcommand("curve", "reconstruct the closed curve of a field");
    DomainFlags cv_dom;
    cv_dom.attach(cv);
    double cv_p = 2.0;
    std::string cv_u0 = "1", cv_out = "curve.csv";
    int cv_n = 129, cv_samples = 1025;
    cv->add_option("--p", cv_p);
    cv->add_option("--u0", cv_u0);
    cv->add_option("--n", cv_n);
    cv->add_option("--samples", cv_samples);
    cv->add_option("--output", cv_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (*sim) return cmd_simulate(config_path, sim_values);

    // The remaining subcommands validate everything up front, so errors thrown
    // beyond that point are runtime failures.
    int stage = kExitConfig;
    try {
        if (*pred) {
            const Field u0 = parse_u0(pred_u0).build(make_grid(pred_dom.length(), pred_n));
            stage = kExitRuntime;
            std::cout << to_json(predict_limit(u0, pred_p)).dump() << '\n';
        } else if (*st) {
            const double a = st_dom.length();
            const SteadySet set = classify(a, st_p);
            auto j = nlohmann::ordered_json{{"classification", to_json(set)}};
            if (st_A && st_I0) {
                if (!set.k) throw DomainNotMultipleOfPi(a);
                stage = kExitRuntime;
                j["A"] = *st_A;
                j["I0"] = *st_I0;
                j["B"] = solve_BA(*st_A, st_p, *set.k, *st_I0);
            } else if (st_A || st_I0) {
                throw ConfigError("--A and --I0 must be given together");
            }
            std::cout << j.dump() << '\n';
        } else if (*sw) {
            const auto ps = parse_list("p", sw_p);
            const auto as = parse_list("a", sw_a);
            const auto amps = parse_list("amp", sw_amp);
            SolverConfig base;
            base.t_max = sw_tmax;
            base.validate();
            stage = kExitRuntime;
            const SweepResult r = run_sweep(ps, as, amps, base, sw_n, sw_workers);
            std::ostringstream csv;
            write_sweep_csv(csv, r);
            const fs::path path = fs::path(sw_out) / "sweep.csv";
            write_file(path, csv.str());
            std::cout << path.string() << '\n';
        } else if (*ls) {
            stage = kExitRuntime;
            const LsReport r = run_ls_suite(ls_a, ls_trials, ls_seed, ls_n);
            std::cout << to_json(r).dump(2) << '\n';
            return r.passed() ? kExitOk : kExitViolation;
        } else if (*cv) {
            const Field u = parse_u0(cv_u0).build(make_grid(cv_dom.length(), cv_n));
            stage = kExitRuntime;
            const Curve c = reconstruct_curve(u, cv_p, cv_samples);
            std::ostringstream csv;
            write_curve_csv(csv, c);
            write_file(fs::absolute(cv_out), csv.str());
            nlohmann::ordered_json j{{"output", cv_out},
                                     {"gap_x", c.gap_x},
                                     {"gap_y", c.gap_y},
                                     {"gap", c.gap},
                                     {"length", c.length}};
            std::cout << j.dump() << '\n';
        }
    } catch (const Error& e) {
        std::cerr << (stage == kExitConfig ? "config error: " : "runtime error: ") << e.what()
                  << '\n';
        return stage;
    }
    return kExitOk;
}

}  // namespace nflow
