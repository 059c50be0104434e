#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nflow/evolution.hpp"
#include "nflow/experiments.hpp"
#include "nflow/steady_states.hpp"

namespace nflow {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

struct RunConfig {
    std::string experiment = "run";
    std::optional<double> a;
    std::optional<std::string> a_over_pi;  // rational, e.g. "1/2"
    int n = 129;
    InitialData u0;
    std::string output_dir = "runs";
    std::uint64_t seed = 0;
    SolverConfig solver;

    /// Domain length; throws ConfigError unless exactly one of a / a_over_pi is set.
    double length() const;
};

/// Parses "p/q", "p" or a decimal; throws ConfigError.
double parse_rational(const std::string& s);

/// "c0 k1:c1 k2:c2 ..." into InitialData.
InitialData parse_u0(const std::string& s);

/// Applies one key/value pair; throws ConfigError on unknown keys or bad values.
void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat "key = value" lines, '#' starts a comment.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Keys accepted by apply_config_key, in documentation order.
const std::vector<std::string>& config_keys();

/// NFLOW_OUTPUT_DIR when set, otherwise cfg.output_dir.
std::string resolve_output_dir(const RunConfig& cfg);

inline constexpr const char* kTraceHeader =
    "step,t,dt,E,I,ubar,min_u,max_u,residual_inf,dissipation,lyapunov,closure";

std::string trace_row(const DiagnosticsRecord& r);
void write_trace(std::ostream& out, const std::vector<DiagnosticsRecord>& trace);

nlohmann::ordered_json to_json(const SteadyState& s);
nlohmann::ordered_json to_json(const LimitPrediction& p);
nlohmann::ordered_json to_json(const SteadySet& s);
nlohmann::ordered_json to_json(const ExperimentReport& r);
nlohmann::ordered_json to_json(const LsReport& r);

nlohmann::ordered_json summary_json(const RunConfig& cfg, const Field& u0, const SimOutcome& out);

void write_sweep_csv(std::ostream& out, const SweepResult& r);
void write_curve_csv(std::ostream& out, const Curve& c);

}  // namespace nflow
