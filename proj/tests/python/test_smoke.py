import math

import pytest

import nflow


def test_field_round_trip():
    f = nflow.Field.from_u0(1.0, 33, "2 1:0.5")
    assert len(f) == 33
    g = nflow.Field.from_coeffs(1.0, f.coeffs)
    assert max(abs(x - y) for x, y in zip(f.values, g.values)) < 1e-14
    assert f.coeffs[1] == pytest.approx(0.5)


def test_diagnostics():
    f = nflow.Field.from_u0(2 * nflow.pi, 129, "1 1:0.5")
    assert nflow.energy(f) == pytest.approx(-0.1875 * math.pi, rel=1e-12)
    g = nflow.Field.from_u0(1.0, 129, "2 1:1")
    assert nflow.conserved_integral(g, 2.0) == pytest.approx(1 / math.sqrt(3), rel=1e-13)
    assert nflow.ls_constant(2 * nflow.pi) == pytest.approx(0.8)
    assert nflow.ls_check(g)["holds"]


def test_steady_states():
    assert nflow.solve_BA(1.0, 2.0, 1, math.pi) == pytest.approx(math.sqrt(2), rel=1e-12)
    assert nflow.compute_A0(1.25, 1, nflow.cosine_family_integral(1, 1, 1.25, 1)) == 1.0
    with pytest.raises(nflow.ExponentOutOfRange):
        nflow.compute_A0(1.5, 1, 1.0)
    assert nflow.classify(nflow.pi, 1.25)["degenerate_limits"] is True
    pred = nflow.predict_limit(nflow.Field.from_u0(1.0, 65, "2"), 2.0)
    assert pred == {"kind": "constant", "c": pytest.approx(2.0)}


def test_simulate_converges():
    u0 = nflow.Field.from_u0(1.0, 33, "2 1:0.5")
    out = nflow.simulate(u0, {"p": 2.0})
    assert out["outcome"] == "converged"
    assert out["fit"]["kind"] == "constant"
    assert out["fit"]["B"] == pytest.approx(math.sqrt(3.75), rel=1e-6)
    assert out["trace"][0]["step"] == 0


def test_simulate_blowup():
    u0 = nflow.Field.from_u0(2 * nflow.pi, 33, "1 1:0.5")
    out = nflow.simulate(u0, {"p": 1.5})
    assert out["outcome"] == "blowup"


def test_errors():
    with pytest.raises(nflow.NonPositiveField):
        nflow.Field.from_u0(1.0, 33, "0.3 1:0.5")
    with pytest.raises(nflow.ConfigError):
        nflow.simulate(nflow.Field.constant(1.0, 33, 1.0), {"bogus": 1})
    with pytest.raises(nflow.DomainNotMultipleOfPi):
        nflow.reconstruct_curve(nflow.Field.constant(1.0, 33, 1.0), 2.0)


def test_curve_and_ls_suite():
    c = nflow.reconstruct_curve(nflow.Field.constant(nflow.pi, 65, 1.0), 2.0, 129)
    assert c["gap"] < 1e-12
    assert c["length"] == pytest.approx(2 * math.pi)
    rep = nflow.run_ls_suite([nflow.pi, 1.0], 50, 3)
    assert rep["passed"]
