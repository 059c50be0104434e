#include "nflow/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "nflow/diagnostics.hpp"
#include "nflow/errors.hpp"

namespace nflow {

using nlohmann::ordered_json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
    }
    return x;
}

long parse_integer(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    long x = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
    }
    return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
    const std::string s = trim(v);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("'" + key + "': expected a boolean, got '" + v + "'");
}

// JSON has no representation for non-finite numbers.
ordered_json num(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

double parse_rational(const std::string& raw) {
    const std::string s = trim(raw);
    const auto slash = s.find('/');
    if (slash == std::string::npos) return parse_number("a_over_pi", s);
    const double num = parse_number("a_over_pi", s.substr(0, slash));
    const double den = parse_number("a_over_pi", s.substr(slash + 1));
    if (den == 0.0) throw ConfigError("a_over_pi: zero denominator");
    return num / den;
}

InitialData parse_u0(const std::string& raw) {
    std::istringstream in(raw);
    std::string tok;
    InitialData d;
    d.modes.clear();
    bool have_constant = false;
    while (in >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) {
            if (have_constant) throw ConfigError("u0: more than one constant term in '" + raw + "'");
            d.constant = parse_number("u0", tok);
            have_constant = true;
            continue;
        }
        const long k = parse_integer("u0", tok.substr(0, colon));
        if (k < 0) throw ConfigError("u0: negative mode index in '" + tok + "'");
        d.modes.emplace_back(static_cast<int>(k), parse_number("u0", tok.substr(colon + 1)));
    }
    if (!have_constant) throw ConfigError("u0: missing constant term");
    return d;
}

double RunConfig::length() const {
    if (a && a_over_pi) throw ConfigError("give exactly one of a / a_over_pi, not both");
    if (!a && !a_over_pi) throw ConfigError("missing domain length: set a or a_over_pi");
    const double len = a ? *a : parse_rational(*a_over_pi) * kPi;
    if (!(len > 0.0) || !std::isfinite(len)) throw ConfigError("domain length must be positive");
    return len;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "experiment", "a", "a_over_pi", "n", "u0", "output_dir", "seed",
        "p", "step_tol", "dt_init", "dt_min", "dt_max", "blowup_threshold",
        "conv_tol", "conv_window", "t_max", "project_conservation", "record_every", "fit_tol"};
    return keys;
}

void apply_config_key(RunConfig& c, const std::string& key, const std::string& v) {
    SolverConfig& s = c.solver;
    if (key == "experiment") c.experiment = trim(v);
    else if (key == "a") c.a = parse_number(key, v);
    else if (key == "a_over_pi") { parse_rational(v); c.a_over_pi = trim(v); }
    else if (key == "n") c.n = static_cast<int>(parse_integer(key, v));
    else if (key == "u0") c.u0 = parse_u0(v);
    else if (key == "output_dir") c.output_dir = trim(v);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_integer(key, v));
    else if (key == "p") s.p = parse_number(key, v);
    else if (key == "step_tol") s.step_tol = parse_number(key, v);
    else if (key == "dt_init") s.dt_init = parse_number(key, v);
    else if (key == "dt_min") s.dt_min = parse_number(key, v);
    else if (key == "dt_max") s.dt_max = parse_number(key, v);
    else if (key == "blowup_threshold") s.blowup_threshold = parse_number(key, v);
    else if (key == "conv_tol") s.conv_tol = parse_number(key, v);
    else if (key == "conv_window") s.conv_window = static_cast<int>(parse_integer(key, v));
    else if (key == "t_max") s.t_max = parse_number(key, v);
    else if (key == "project_conservation") s.project_conservation = parse_bool(key, v);
    else if (key == "record_every") s.record_every = static_cast<int>(parse_integer(key, v));
    else if (key == "fit_tol") s.fit_tol = parse_number(key, v);
    else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(std::istream& in) {
    RunConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        apply_config_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config '" + path + "'");
    return parse_config(f);
}

std::string resolve_output_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv("NFLOW_OUTPUT_DIR"); env && *env) return env;
    return cfg.output_dir;
}

std::string trace_row(const DiagnosticsRecord& r) {
    std::string s;
    s += std::to_string(r.step);
    for (double v : {r.t, r.dt, r.energy, r.conserved, r.mean, r.min_u, r.max_u, r.residual_inf}) {
        s += ',';
        s += format_double(v);
    }
    s += ',' + opt_cell(r.dissipation);
    s += ',' + format_double(r.lyapunov);
    s += ',' + opt_cell(r.closure);
    return s;
}

void write_trace(std::ostream& out, const std::vector<DiagnosticsRecord>& trace) {
    out << kTraceHeader << '\n';
    for (const auto& r : trace) out << trace_row(r) << '\n';
}

ordered_json to_json(const SteadyState& s) {
    ordered_json j;
    j["kind"] = kind_name(s);
    j["A"] = cosine_amplitude(s);
    j["B"] = cosine_offset(s);
    j["phase"] = phase_of(s);
    return j;
}

ordered_json to_json(const LimitPrediction& p) {
    ordered_json j;
    if (const auto* u = std::get_if<UniqueLimit>(&p)) {
        j["kind"] = "constant";
        j["c"] = cosine_offset(u->state);
        return j;
    }
    const auto& f = std::get<FamilyLimit>(p);
    j["kind"] = "family";
    j["I0"] = f.I0;
    j["k"] = f.k;
    j["p"] = f.p;
    j["A0"] = f.A0 ? ordered_json(*f.A0) : ordered_json(nullptr);
    return j;
}

ordered_json to_json(const SteadySet& s) {
    ordered_json j;
    j["a"] = s.a;
    j["p"] = s.p;
    j["k"] = s.k ? ordered_json(*s.k) : ordered_json(nullptr);
    j["cosine_family"] = s.cosine_family;
    j["degenerate_limits"] = s.degenerate_limits;
    return j;
}

ordered_json to_json(const ExperimentReport& r) {
    ordered_json j;
    j["experiment"] = r.experiment;
    j["kind"] = r.kind;
    j["passed"] = r.passed();
    j["E0"] = num(r.energy_initial);
    j["max_initial"] = num(r.max_initial);
    j["max_observed"] = num(r.max_observed);
    j["bounded"] = r.bounded_flag;
    if (r.outcome) j["outcome"] = outcome_name(r.outcome->tag);
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    j["checks"] = checks;
    ordered_json tail = ordered_json::array();
    for (double d : r.tail_cauchy) tail.push_back(num(d));
    j["tail_cauchy"] = tail;
    return j;
}

ordered_json to_json(const LsReport& r) {
    ordered_json j;
    j["seed"] = r.seed;
    j["passed"] = r.passed();
    ordered_json entries = ordered_json::array();
    for (const auto& e : r.entries) {
        ordered_json x;
        x["a"] = e.a;
        x["C_a"] = e.constant;
        x["extremal_mode"] = e.extremal_mode;
        x["trials"] = e.trials;
        x["violations"] = e.violations;
        x["max_violation"] = num(e.max_violation);
        x["equality_ratio"] = num(e.equality_ratio);
        x["constant_case_zero"] = e.constant_case_zero;
        entries.push_back(x);
    }
    j["entries"] = entries;
    return j;
}

ordered_json summary_json(const RunConfig& cfg, const Field& u0, const SimOutcome& out) {
    const double p = cfg.solver.p;
    const Field& uf = out.final_field;
    ordered_json j;
    j["experiment"] = cfg.experiment;
    j["a"] = u0.grid().length();
    j["n"] = u0.size();
    j["p"] = p;
    j["seed"] = cfg.seed;
    j["outcome"] = outcome_name(out.tag);
    if (const auto* c = std::get_if<Converged>(&out.tag)) {
        j["t_end"] = c->t;
    } else if (const auto* b = std::get_if<Blowup>(&out.tag)) {
        j["t_blowup_estimate"] = b->t_estimate;
        j["trigger"] = trigger_name(b->trigger);
    } else {
        const auto& u = std::get<Undecided>(out.tag);
        j["t_end"] = u.t_end;
        j["step_collapse"] = u.step_collapse;
    }
    j["E0"] = num(energy(u0));
    j["E_final"] = num(energy(uf));
    const double I_final = conserved_integral(uf, p);
    j["I0"] = num(out.conserved_initial);
    j["I_final"] = num(I_final);
    j["I_relative_drift"] = num(std::abs(I_final - out.conserved_initial) / out.conserved_initial);

    if (const auto* c = std::get_if<Converged>(&out.tag)) {
        ordered_json fit = c->fit.state ? to_json(*c->fit.state) : ordered_json{{"kind", nullptr}};
        fit["residual"] = num(c->fit.residual);
        fit["A_fit"] = c->fit.A_fit;
        fit["B_fit"] = c->fit.B_fit;
        j["fitted"] = fit;
    } else {
        j["fitted"] = nullptr;
    }

    ordered_json cmp;
    try {
        const LimitPrediction pred = predict_limit(u0, p);
        cmp["prediction"] = to_json(pred);
        const auto* c = std::get_if<Converged>(&out.tag);
        if (c && c->fit.state) {
            if (const auto* u = std::get_if<UniqueLimit>(&pred)) {
                const Field ref = sample(u->state, uf.grid_ptr());
                double err = 0.0;
                for (int i = 0; i < uf.size(); ++i) {
                    err = std::max(err, std::abs(uf.values()[i] - ref.values()[i]));
                }
                cmp["sup_error"] = num(err);
            } else {
                const auto& fam = std::get<FamilyLimit>(pred);
                const double A = cosine_amplitude(*c->fit.state);
                const double B = cosine_offset(*c->fit.state);
                cmp["I_of_fit"] = num(cosine_family_integral(A, B, p, fam.k));
                try {
                    cmp["B_of_A_fit"] = num(fam.B_of_A(A));
                    cmp["B_error"] = num(std::abs(fam.B_of_A(A) - B));
                } catch (const Error& e) {
                    cmp["B_of_A_fit"] = nullptr;
                    cmp["note"] = e.what();
                }
            }
        }
    } catch (const Error& e) {
        cmp["error"] = e.what();
    }
    j["prediction_comparison"] = cmp;
    j["solver"] = {{"steps", out.steps},
                   {"rejections", out.rejections},
                   {"step_tol", cfg.solver.step_tol},
                   {"conv_tol", cfg.solver.conv_tol},
                   {"project_conservation", cfg.solver.project_conservation}};
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&tt), "%Y-%m-%dT%H:%M:%SZ");
    j["metadata"] = {{"created", ts.str()}};
    return j;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    out << "p,a,amp,E0,outcome,t_end,kind,A,B,error\n";
    for (const auto& c : r.cells) {
        out << format_double(c.p) << ',' << format_double(c.a) << ',' << format_double(c.amp)
            << ',' << format_double(c.energy_initial) << ',' << c.outcome << ','
            << format_double(c.t_end) << ',';
        if (c.fitted) {
            out << kind_name(*c.fitted) << ',' << format_double(cosine_amplitude(*c.fitted)) << ','
                << format_double(cosine_offset(*c.fitted));
        } else {
            out << ",,";
        }
        out << ',';
        if (!c.error.empty()) {
            std::string e = c.error;
            std::string q;
            for (char ch : e) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            out << '"' << q << '"';
        }
        out << '\n';
    }
}

void write_curve_csv(std::ostream& out, const Curve& c) {
    out << "x,y\n";
    for (const auto& [x, y] : c.points) out << format_double(x) << ',' << format_double(y) << '\n';
}

}  // namespace nflow
