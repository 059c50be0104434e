#include <doctest.h>

#include <cmath>
#include <set>

#include "nflow/diagnostics.hpp"
#include "nflow/errors.hpp"
#include "nflow/experiments.hpp"

using namespace nflow;
using doctest::Approx;

TEST_CASE("shipped specs") {
    std::set<std::string> names;
    for (const auto& s : shipped_specs()) {
        CHECK(names.insert(s.name).second);
        CHECK_NOTHROW(s.params.validate());
        CHECK(s.initial_field().min() > 0.0);
    }
    for (const auto& n : convergence_spec_names()) CHECK(names.count(n) == 1);
    CHECK(energy(shipped_spec("blowup_a2pi_p1.5").initial_field()) == Approx(-0.1875 * kPi).epsilon(1e-13));
    CHECK(std::abs(energy(shipped_spec("bounded_api_p2").initial_field())) <= 1e-13);
    CHECK_THROWS_AS(shipped_spec("nope"), InvalidArgument);
}

TEST_CASE("initial data rejects non-positive fields") {
    CHECK_THROWS_AS(InitialData({0.3, {{1, 0.5}}}).build(make_grid(1.0, 33)), NonPositiveField);
    CHECK_THROWS_AS(InitialData({1.0, {{-1, 0.1}}}).build(make_grid(1.0, 33)), InvalidArgument);
}

TEST_CASE("dichotomy on a small domain") {
    const ExperimentReport r = run_dichotomy(shipped_spec("small_domain_a1_p1.5"));
    CHECK(r.energy_initial >= 0.0);
    CHECK(r.passed());
    CHECK(outcome_name(r.outcome->tag) == "converged");
}

TEST_CASE("convergence reports") {
    const ExperimentReport c = run_convergence(shipped_spec("const_api_p2"));
    CHECK(c.passed());
    CHECK(std::get<Converged>(c.outcome->tag).t < 1e-2);

    const ExperimentReport s = run_convergence(shipped_spec("steady_api_p2"));
    CHECK(s.passed());

    const ExperimentReport f = run_convergence(shipped_spec("conv_api_p2"));
    for (const auto& chk : f.checks) {
        INFO(chk.name << ": " << chk.detail);
        CHECK(chk.passed);
    }
    const auto& fit = std::get<Converged>(f.outcome->tag).fit;
    REQUIRE(fit.state.has_value());
    CHECK(kind_name(*fit.state) == "cosine");
}

TEST_CASE("sweep regimes follow the closed-form energy") {
    SolverConfig cfg;
    cfg.t_max = 20.0;
    const SweepResult r = run_sweep({1.5, 2.0}, {1.0, 4.0}, {0.2, 0.5}, cfg, 33, 2);
    REQUIRE(r.cells.size() == 8);
    for (const auto& c : r.cells) {
        INFO("p=" << c.p << " a=" << c.a << " amp=" << c.amp << " " << c.error);
        CHECK(c.energy_initial == Approx(single_mode_energy(c.a, c.amp)).epsilon(1e-12));
        if (c.energy_initial < 0.0) CHECK(c.outcome == "blowup");
        if (c.a < kPi && c.p <= 2.0) CHECK(c.outcome == "converged");
    }
    // Cell order is p-major and independent of the worker count.
    CHECK(r.cells[1].amp == 0.5);
    CHECK(r.cells[2].a == 4.0);
    const SweepResult serial = run_sweep({1.5, 2.0}, {1.0, 4.0}, {0.2, 0.5}, cfg, 33, 1);
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
        CHECK(serial.cells[i].outcome == r.cells[i].outcome);
        CHECK(serial.cells[i].t_end == r.cells[i].t_end);
    }
}

TEST_CASE("energy threshold of the sweep family") {
    for (double a : {0.5, 1.0, 2.0, kPi}) CHECK(single_mode_energy(a, 0.3) >= 0.0);
    for (double a : {3.2, 5.0, 10.0}) CHECK(single_mode_energy(a, 0.3) < 0.0);
}

TEST_CASE("ls suite") {
    const LsReport r = run_ls_suite({kPi, 2.0 * kPi}, 200, 7);
    CHECK(r.passed());
    CHECK(r.entries[0].extremal_mode == 2);
    CHECK(r.entries[0].equality_ratio == Approx(1.0).epsilon(1e-12));
    CHECK(r.entries[1].constant == Approx(0.8));
    const LsReport again = run_ls_suite({kPi, 2.0 * kPi}, 200, 7);
    CHECK(again.entries[0].max_violation == r.entries[0].max_violation);
    CHECK_THROWS_AS(run_ls_suite({kPi}, 0, 1), InvalidArgument);
}

TEST_CASE("random ls fields") {
    std::mt19937_64 rng(1);
    const auto c = random_ls_coeffs(129, rng);
    CHECK(c[0] == 0.0);
    for (int k = 33; k < 129; ++k) CHECK(c[k] == 0.0);
    for (int k = 1; k <= 32; ++k) CHECK(std::abs(c[k]) <= 1.0 / (k * k));
}

TEST_CASE("curve reconstruction") {
    const Field one = Field::constant(make_grid(kPi, 65), 1.0);
    const Curve c = reconstruct_curve(one, 2.0, 513);
    CHECK(c.points.size() == 513);
    CHECK(c.gap <= 1e-12);
    CHECK(c.length == Approx(2.0 * kPi).epsilon(1e-14));
    for (const auto& [x, y] : c.points) CHECK(std::hypot(x, y - 1.0) == Approx(1.0).epsilon(1e-12));

    for (double p : {1.25, 2.0}) {
        const Field f = InitialData{2.0, {{1, 0.4}, {2, 0.1}}}.build(make_grid(kPi, 129));
        const Curve cf = reconstruct_curve(f, p);
        CHECK(std::abs(cf.gap_x) == Approx(std::abs(2.0 * closure_integral(f, p))).epsilon(1e-10));
        CHECK(std::abs(cf.gap_y) <= 1e-12);
        CHECK(cf.length == Approx(2.0 * conserved_integral(f, p)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(reconstruct_curve(Field::constant(make_grid(1.0, 17), 1.0), 2.0),
                    DomainNotMultipleOfPi);
}
