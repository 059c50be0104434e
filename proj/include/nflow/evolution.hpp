#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nflow/diagnostics.hpp"
#include "nflow/spectral.hpp"
#include "nflow/steady_states.hpp"

namespace nflow {

struct SolverConfig {
    double p = 2.0;
    double step_tol = 1e-8;
    /// Non-positive selects min(1e-4, 0.1 (a/n)^2 / max(u0)^p).
    double dt_init = 0.0;
    double dt_min = 1e-14;
    double dt_max = 1e-1;
    double blowup_threshold = 1e8;
    double conv_tol = 1e-9;
    int conv_window = 50;
    double t_max = 100.0;
    bool project_conservation = false;
    int record_every = 100;
    double fit_tol = kDefaultFitTol;

    /// Throws InvalidArgument describing the first violated constraint.
    void validate() const;
};

/// u^p (u_xx + u - mean(u)) at the nodes.
Field rhs(const Field& f, double p);

struct StepResult {
    Field field;
    double t = 0.0;
    double dt_next = 0.0;
    bool accepted = false;
    double error = 0.0;  // scaled local error estimate of the attempted step
};

/// One attempt of the embedded Dormand-Prince 5(4) step from (f, t) with size dt.
/// Throws StepCollapse when a rejection would push dt below cfg.dt_min.
StepResult step(const Field& f, double t, double dt, const SolverConfig& cfg);

/// Stateful integrator: owns the state vector, the first-same-as-last stage and the
/// step-size controller history. One instance per trajectory.
class Integrator {
public:
    Integrator(const Field& u0, const SolverConfig& cfg);

    /// Attempts one step; returns true when accepted.
    bool attempt();

    const std::vector<double>& state() const noexcept { return u_; }
    Field field() const;
    double t() const noexcept { return t_; }
    double dt() const noexcept { return dt_; }
    double last_dt() const noexcept { return last_dt_; }
    double last_error() const noexcept { return last_err_; }
    /// sup |u_xx + u - mean| at the current state.
    double residual_inf() const noexcept { return residual_inf_; }
    /// Estimate of the spectral radius of the linearised right-hand side.
    double stiffness() const noexcept;
    long accepted_steps() const noexcept { return accepted_; }
    long rejected_steps() const noexcept { return rejected_; }

    /// Multiplies the state by c (used by the conservation projection).
    void rescale(double c);
    void set_dt(double dt) noexcept { dt_ = dt; }

private:
    void evaluate(const std::vector<double>& u, std::vector<double>& out, double* res_inf);

    GridPtr grid_;
    SolverConfig cfg_;
    std::vector<double> u_;
    std::vector<double> k_[7];
    std::vector<double> stage_, unew_, d2_;
    double t_ = 0.0;
    double t_comp_ = 0.0;  // compensated-sum carry for t
    double dt_ = 0.0;
    double last_dt_ = 0.0;
    double last_err_ = 0.0;
    double prev_err_ratio_ = 1.0;
    double residual_inf_ = 0.0;
    double candidate_res_inf_ = 0.0;
    long accepted_ = 0;
    long rejected_ = 0;
};

struct Converged {
    SteadyMatch fit;
    double t = 0.0;
};

enum class BlowupTrigger { Threshold, DtCollapse };

struct Blowup {
    double t_estimate = 0.0;
    BlowupTrigger trigger = BlowupTrigger::Threshold;
};

struct Undecided {
    double t_end = 0.0;
    /// Set when the run stopped on step collapse without a growing maximum.
    bool step_collapse = false;
};

using OutcomeTag = std::variant<Converged, Blowup, Undecided>;

std::string outcome_name(const OutcomeTag& tag);  // "converged" | "blowup" | "undecided"
std::string trigger_name(BlowupTrigger t);        // "threshold" | "dt-collapse"

struct SimOutcome {
    OutcomeTag tag;
    std::vector<DiagnosticsRecord> trace;
    Field final_field;
    long steps = 0;
    long rejections = 0;
    double conserved_initial = 0.0;
};

/// Called at every recorded snapshot (including the initial and the final one).
using RecordObserver = std::function<void(const DiagnosticsRecord&, const Field&)>;

SimOutcome simulate(const Field& u0, const SolverConfig& cfg,
                    const RecordObserver& observer = {});

}  // namespace nflow
