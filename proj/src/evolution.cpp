#include "nflow/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "nflow/errors.hpp"

namespace nflow {

namespace {

// Dormand-Prince 5(4) tableau (the system is autonomous, so stage times are unused).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Real-axis stability limit of the 5th order propagator is about 3.3; keep a margin.
constexpr double kStabilityLimit = 2.9;

double power(double u, double p) { return p == 2.0 ? u * u : std::pow(u, p); }

}  // namespace

void SolverConfig::validate() const {
    auto fail = [](const std::string& m) { throw InvalidArgument("invalid solver config: " + m); };
    if (!(p > 1.0)) fail("p must exceed 1");
    if (!(step_tol > 0.0)) fail("step_tol must be positive");
    if (!(dt_min > 0.0)) fail("dt_min must be positive");
    if (!(dt_max > dt_min)) fail("dt_min must be smaller than dt_max");
    if (!(blowup_threshold > 0.0)) fail("blowup_threshold must be positive");
    if (!(conv_tol > 0.0)) fail("conv_tol must be positive");
    if (conv_window < 1) fail("conv_window must be >= 1");
    if (!(t_max > 0.0)) fail("t_max must be positive");
    if (record_every < 1) fail("record_every must be >= 1");
    if (!(fit_tol > 0.0)) fail("fit_tol must be positive");
}

Field rhs(const Field& f, double p) {
    const auto u = f.values();
    require_positive(u);
    const Grid& g = f.grid();
    std::vector<double> d2(u.size());
    g.second_derivative(u, d2);
    const double ubar = g.integrate(u) / g.length();
    std::vector<double> out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = power(u[j], p) * (d2[j] + u[j] - ubar);
    return Field::from_values(f.grid_ptr(), std::move(out));
}

Integrator::Integrator(const Field& u0, const SolverConfig& cfg)
    : grid_(u0.grid_ptr()), cfg_(cfg), u_(u0.values().begin(), u0.values().end()) {
    cfg_.validate();
    require_positive(u_);
    const std::size_t n = u_.size();
    for (auto& k : k_) k.assign(n, 0.0);
    stage_.assign(n, 0.0);
    unew_.assign(n, 0.0);
    d2_.assign(n, 0.0);
    evaluate(u_, k_[0], &residual_inf_);
    if (cfg_.dt_init > 0.0) {
        dt_ = cfg_.dt_init;
    } else {
        const double h = grid_->length() / grid_->size();
        const double umax = *std::max_element(u_.begin(), u_.end());
        dt_ = std::min(1e-4, 0.1 * h * h / power(umax, cfg_.p));
    }
    dt_ = std::min({dt_, cfg_.dt_max, kStabilityLimit / stiffness()});
}

void Integrator::evaluate(const std::vector<double>& u, std::vector<double>& out,
                          double* res_inf) {
    grid_->second_derivative(u, d2_);
    const double ubar = grid_->integrate(u) / grid_->length();
    double rinf = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double r = d2_[j] + u[j] - ubar;
        rinf = std::max(rinf, std::abs(r));
        out[j] = power(u[j], cfg_.p) * r;
    }
    if (res_inf) *res_inf = rinf;
}

double Integrator::stiffness() const noexcept {
    const double umax = *std::max_element(u_.begin(), u_.end());
    return power(umax, cfg_.p) * (grid_->max_eigenvalue() + 1.0);
}

Field Integrator::field() const { return Field::from_values(grid_, u_); }

void Integrator::rescale(double c) {
    for (double& v : u_) v *= c;
    // f(c u) = c^(p+1) f(u) keeps the first-same-as-last stage valid.
    const double s = std::pow(c, cfg_.p + 1.0);
    for (double& v : k_[0]) v *= s;
    residual_inf_ *= c;
}

bool Integrator::attempt() {
    if (dt_ < cfg_.dt_min) throw StepCollapse(dt_);
    const double h = dt_;
    const std::size_t n = u_.size();
    auto& k1 = k_[0];
    auto& k2 = k_[1];
    auto& k3 = k_[2];
    auto& k4 = k_[3];
    auto& k5 = k_[4];
    auto& k6 = k_[5];
    auto& k7 = k_[6];

    bool ok = true;
    auto stage = [&](auto&& combine, std::vector<double>& out) {
        for (std::size_t j = 0; j < n; ++j) {
            stage_[j] = u_[j] + h * combine(j);
            if (!(stage_[j] > 0.0)) ok = false;
        }
        if (ok) evaluate(stage_, out, nullptr);
    };
    stage([&](std::size_t j) { return a21 * k1[j]; }, k2);
    if (ok) stage([&](std::size_t j) { return a31 * k1[j] + a32 * k2[j]; }, k3);
    if (ok) stage([&](std::size_t j) { return a41 * k1[j] + a42 * k2[j] + a43 * k3[j]; }, k4);
    if (ok) {
        stage([&](std::size_t j) {
            return a51 * k1[j] + a52 * k2[j] + a53 * k3[j] + a54 * k4[j];
        }, k5);
    }
    if (ok) {
        stage([&](std::size_t j) {
            return a61 * k1[j] + a62 * k2[j] + a63 * k3[j] + a64 * k4[j] + a65 * k5[j];
        }, k6);
    }
    double err = 0.0;
    if (ok) {
        for (std::size_t j = 0; j < n; ++j) {
            unew_[j] = u_[j] + h * (b1 * k1[j] + b3 * k3[j] + b4 * k4[j] + b5 * k5[j] +
                                    b6 * k6[j]);
            if (!(unew_[j] > 0.0) || !std::isfinite(unew_[j])) ok = false;
        }
    }
    if (ok) {
        evaluate(unew_, k7, &candidate_res_inf_);
        for (std::size_t j = 0; j < n; ++j) {
            const double e = h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] +
                                  e6 * k6[j] + e7 * k7[j]);
            const double scale = 1.0 + std::max(std::abs(u_[j]), std::abs(unew_[j]));
            err = std::max(err, std::abs(e) / scale);
        }
        if (!std::isfinite(err)) ok = false;
    }

    last_dt_ = h;
    last_err_ = ok ? err : std::numeric_limits<double>::infinity();
    if (!ok || err > cfg_.step_tol) {
        ++rejected_;
        dt_ = 0.5 * h;
        return false;
    }

    u_.swap(unew_);
    k1.swap(k7);
    residual_inf_ = candidate_res_inf_;
    const double y = h - t_comp_;
    const double tn = t_ + y;
    t_comp_ = (tn - t_) - y;
    t_ = tn;
    ++accepted_;

    // Proportional-integral controller on the error ratio.
    const double ratio = std::max(err / cfg_.step_tol, 1e-10);
    double fac = 0.9 * std::pow(ratio, -0.7 / 5.0) * std::pow(prev_err_ratio_, 0.4 / 5.0);
    fac = std::clamp(fac, 0.2, 5.0);
    prev_err_ratio_ = std::max(ratio, 1e-4);
    dt_ = std::min({h * fac, cfg_.dt_max, kStabilityLimit / stiffness()});
    return true;
}

StepResult step(const Field& f, double t, double dt, const SolverConfig& cfg) {
    Integrator integ(f, cfg);
    integ.set_dt(dt);
    const bool accepted = integ.attempt();
    StepResult r{integ.field(), accepted ? t + dt : t, integ.dt(), accepted, integ.last_error()};
    return r;
}

std::string outcome_name(const OutcomeTag& tag) {
    if (std::holds_alternative<Converged>(tag)) return "converged";
    if (std::holds_alternative<Blowup>(tag)) return "blowup";
    return "undecided";
}

std::string trigger_name(BlowupTrigger t) {
    return t == BlowupTrigger::Threshold ? "threshold" : "dt-collapse";
}

SimOutcome simulate(const Field& u0, const SolverConfig& cfg, const RecordObserver& observer) {
    cfg.validate();
    require_positive(u0.values());
    const double p = cfg.p;
    const Grid& g = u0.grid();
    Integrator integ(u0, cfg);
    const double I0 = conserved_integral(u0, p);

    std::vector<DiagnosticsRecord> trace;
    long last_recorded = -1;
    auto record = [&]() {
        const long s = integ.accepted_steps();
        if (s == last_recorded) return;
        const Field f = integ.field();
        const Field ut = rhs(f, p);
        DiagnosticsRecord r = make_record(f, p, integ.t(), &ut);
        r.step = s;
        r.dt = integ.last_dt();
        if (observer) observer(r, f);
        trace.push_back(std::move(r));
        last_recorded = s;
    };
    record();

    std::deque<double> recent_max;
    int stationary = 0;
    std::optional<OutcomeTag> tag;
    auto umax_of = [&]() {
        const auto& u = integ.state();
        return *std::max_element(u.begin(), u.end());
    };
    recent_max.push_back(umax_of());

    while (!tag) {
        const double remaining = cfg.t_max - integ.t();
        if (remaining <= 1e-13 * cfg.t_max) {
            tag = Undecided{integ.t(), false};
            break;
        }
        if (integ.dt() > remaining) integ.set_dt(remaining);
        bool accepted = false;
        try {
            accepted = integ.attempt();
        } catch (const StepCollapse&) {
            const bool grew = recent_max.size() >= 2 && recent_max.back() > recent_max.front();
            if (grew) {
                tag = Blowup{integ.t(), BlowupTrigger::DtCollapse};
            } else {
                tag = Undecided{integ.t(), true};
            }
            break;
        }
        if (!accepted) continue;

        if (cfg.project_conservation) {
            double I = 0.0;
            const auto& u = integ.state();
            const auto w = g.weights();
            for (std::size_t j = 0; j < u.size(); ++j) I += w[j] * std::pow(u[j], 1.0 - p);
            integ.rescale(std::pow(I0 / I, 1.0 / (1.0 - p)));
        }

        const double umax = umax_of();
        recent_max.push_back(umax);
        while (static_cast<int>(recent_max.size()) > cfg.conv_window + 1) recent_max.pop_front();

        if (umax > cfg.blowup_threshold) {
            tag = Blowup{integ.t(), BlowupTrigger::Threshold};
            break;
        }
        if (integ.residual_inf() * power(umax, p) <= cfg.conv_tol) {
            ++stationary;
        } else {
            stationary = 0;
        }
        if (stationary >= cfg.conv_window) {
            tag = Converged{match_steady_state(integ.field(), cfg.fit_tol), integ.t()};
            break;
        }
        if (integ.accepted_steps() % cfg.record_every == 0) record();
    }
    record();

    return SimOutcome{*tag,  std::move(trace), integ.field(), integ.accepted_steps(),
                      integ.rejected_steps(), I0};
}

}  // namespace nflow
