#include <doctest.h>

#include <cmath>
#include <vector>

#include "nflow/diagnostics.hpp"
#include "nflow/errors.hpp"
#include "nflow/evolution.hpp"
#include "nflow/experiments.hpp"

using namespace nflow;
using doctest::Approx;

namespace {

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("config validation") {
    SolverConfig c;
    CHECK_NOTHROW(c.validate());
    c.p = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = SolverConfig{};
    c.dt_min = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = SolverConfig{};
    c.conv_window = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("rhs examples") {
    const auto g = make_grid(1.0, 33);
    const Field r0 = rhs(Field::constant(g, 2.0), 2.0);
    for (double v : r0.values()) CHECK(std::abs(v) <= 1e-13);

    const Field s = Field::from_function(make_grid(2.0 * kPi, 65), [](double x) { return 0.4 * std::cos(x) + 0.9; });
    const Field rs = rhs(s, 1.5);
    for (double v : rs.values()) CHECK(std::abs(v) <= 1e-12);

    const auto g2 = make_grid(2.0 * kPi, 65);
    const Field f = Field::from_function(g2, [](double x) { return 1.0 + 0.5 * std::cos(x / 2.0); });
    const Field r = rhs(f, 1.5);
    for (int j = 0; j < 65; ++j) {
        const double x = g2->nodes()[j];
        const double u = f.values()[j];
        CHECK(r.values()[j] == Approx(std::pow(u, 1.5) * 0.375 * std::cos(x / 2.0)).epsilon(1e-12));
    }
    std::vector<double> bad(33, 1.0);
    bad[3] = 0.0;
    CHECK_THROWS_AS(rhs(Field::from_values(g, bad), 2.0), NonPositiveField);
}

TEST_CASE("single step on equilibria") {
    SolverConfig cfg;
    const Field c = Field::constant(make_grid(1.0, 33), 2.0);
    const StepResult r = step(c, 0.0, 0.05, cfg);
    CHECK(r.accepted);
    CHECK(r.t == 0.05);
    CHECK(sup_diff(r.field.values(), c.values()) <= 1e-14);

    const Field s = Field::from_function(make_grid(kPi, 33), [](double x) { return 0.3 * std::cos(x) + 1.0; });
    const StepResult rs = step(s, 0.0, 1e-4, cfg);
    CHECK(rs.accepted);
    CHECK(sup_diff(rs.field.values(), s.values()) <= cfg.step_tol);
}

TEST_CASE("step collapse") {
    SolverConfig cfg;
    const Field f = InitialData{1.0, {{1, 0.5}}}.build(make_grid(1.0, 33));
    CHECK_THROWS_AS(step(f, 0.0, 1e-16, cfg), StepCollapse);
}

TEST_CASE("rejection halves the step and positivity failures reject") {
    SolverConfig cfg;
    const Field f = InitialData{1.0, {{1, 0.5}, {4, 0.2}}}.build(make_grid(1.0, 65));
    const StepResult r = step(f, 0.0, 0.5, cfg);
    CHECK_FALSE(r.accepted);
    CHECK(r.dt_next == 0.25);
    CHECK(r.t == 0.0);
}

TEST_CASE("embedded error estimate is fifth order") {
    SolverConfig cfg;
    cfg.p = 1.5;
    cfg.step_tol = 1.0;
    const Field f = InitialData{2.0, {{1, 0.3}, {2, 0.1}}}.build(make_grid(1.0, 17));
    std::vector<double> hs{1e-3, 5e-4, 2.5e-4, 1.25e-4};
    std::vector<double> errs;
    for (double h : hs) errs.push_back(step(f, 0.0, h, cfg).error);
    for (std::size_t i = 1; i < hs.size(); ++i) {
        const double slope = std::log(errs[i - 1] / errs[i]) / std::log(hs[i - 1] / hs[i]);
        CHECK(slope == Approx(5.0).epsilon(0.15));
    }
}

TEST_CASE("converges to the constant fixed by conservation") {
    SolverConfig cfg;
    const Field u0 = Field::constant(make_grid(1.0, 33), 2.0);
    const SimOutcome out = simulate(u0, cfg);
    const auto& c = std::get<Converged>(out.tag);
    CHECK(c.t < 1e-2);
    CHECK(cosine_offset(*c.fit.state) == Approx(2.0));

    const Field u1 = InitialData{2.0, {{1, 0.5}}}.build(make_grid(1.0, 65));
    const SimOutcome o1 = simulate(u1, cfg);
    const auto& c1 = std::get<Converged>(o1.tag);
    REQUIRE(c1.fit.state.has_value());
    CHECK(kind_name(*c1.fit.state) == "constant");
    CHECK(cosine_offset(*c1.fit.state) == Approx(std::sqrt(3.75)).epsilon(1e-7));
}

TEST_CASE("negative energy blows up") {
    SolverConfig cfg;
    cfg.p = 1.5;
    const Field u0 = InitialData{1.0, {{1, 0.5}}}.build(make_grid(2.0 * kPi, 65));
    CHECK(energy(u0) < 0.0);
    const SimOutcome out = simulate(u0, cfg);
    const auto& b = std::get<Blowup>(out.tag);
    CHECK(b.t_estimate > 1.0);
    CHECK(b.t_estimate < 1.5);
}

TEST_CASE("trace records and observer") {
    SolverConfig cfg;
    cfg.record_every = 10;
    cfg.t_max = 1e-3;
    const Field u0 = InitialData{2.0, {{1, 0.2}}}.build(make_grid(1.0, 33));
    int seen = 0;
    const SimOutcome out = simulate(u0, cfg, [&](const DiagnosticsRecord&, const Field&) { ++seen; });
    CHECK(std::holds_alternative<Undecided>(out.tag));
    CHECK(seen == static_cast<int>(out.trace.size()));
    CHECK(out.trace.front().step == 0);
    CHECK(out.trace.back().step == out.steps);
    for (std::size_t i = 1; i < out.trace.size(); ++i) {
        CHECK(out.trace[i].step > out.trace[i - 1].step);
        CHECK(out.trace[i].energy <= out.trace[i - 1].energy + 10.0 * cfg.step_tol);
    }
}

TEST_CASE("projection keeps the conserved integral") {
    SolverConfig cfg;
    cfg.p = 1.25;
    cfg.project_conservation = true;
    cfg.t_max = 0.05;
    const Field u0 = InitialData{2.0, {{1, 0.3}, {2, 0.2}}}.build(make_grid(kPi, 33));
    const double I0 = conserved_integral(u0, cfg.p);
    const SimOutcome out = simulate(u0, cfg);
    for (const auto& r : out.trace) CHECK(std::abs(r.conserved - I0) <= 1e-14 * I0);
}

TEST_CASE("scaling symmetry") {
    // u -> lambda u with t -> t / lambda^p.
    SolverConfig cfg;
    cfg.p = 1.5;
    cfg.step_tol = 1e-11;
    const double lambda = 2.0;
    const Field u0 = InitialData{1.5, {{1, 0.3}}}.build(make_grid(1.0, 33));
    std::vector<double> scaled(u0.values().begin(), u0.values().end());
    for (double& v : scaled) v *= lambda;
    const Field v0 = Field::from_values(u0.grid_ptr(), scaled);

    cfg.t_max = 0.02;
    const SimOutcome a = simulate(u0, cfg);
    SolverConfig cfg2 = cfg;
    cfg2.t_max = 0.02 / std::pow(lambda, cfg.p);
    const SimOutcome b = simulate(v0, cfg2);
    CHECK(std::get<Undecided>(a.tag).t_end == Approx(0.02).epsilon(1e-12));
    std::vector<double> back(b.final_field.values().begin(), b.final_field.values().end());
    for (double& v : back) v /= lambda;
    CHECK(sup_diff(back, a.final_field.values()) <= 1e-7);
}
