import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nschannel.diagnostics import (
    DiscreteField,
    check_linf_interp,
    check_poincare,
    cond2_check,
    goodman_weights,
    norm,
)

GRID = np.linspace(0.0, 1.0, 1025)
H = GRID[1] - GRID[0]


def _field(values):
    return DiscreteField(GRID, np.asarray(values, dtype=float))


def _random_smooth_field(rng):
    """Low-frequency random Fourier sum: smooth on the grid scale."""
    vals = np.zeros_like(GRID)
    for k in range(1, 9):
        vals += rng.normal() * np.sin(k * math.pi * GRID)
        vals += rng.normal() * np.cos(k * math.pi * GRID)
    return _field(vals)


def test_norm_constant():
    assert norm(_field(np.full_like(GRID, 3.0)), 0) == pytest.approx(3.0)


def test_norm_sine():
    f = _field(np.sin(math.pi * GRID))
    assert norm(f, 0) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-4)
    assert norm(f, 1) == pytest.approx(
        math.sqrt(0.5 + math.pi**2 / 2.0), abs=1e-3)


def test_norm_validation():
    f = _field(GRID)
    with pytest.raises(ValueError):
        norm(f, 4)
    with pytest.raises(ValueError):
        DiscreteField(np.linspace(0, 1, 3), np.zeros(3))


def test_poincare_linear():
    res = check_poincare(_field(GRID))
    assert res["holds"]
    assert res["ratio"] == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-3)


def test_poincare_zero_field():
    res = check_poincare(_field(np.zeros_like(GRID)))
    assert res["holds"] and res["ratio"] == 0.0


def test_poincare_quarter_sine():
    res = check_poincare(_field(np.sin(0.5 * math.pi * GRID)))
    assert res["holds"]
    assert res["ratio"] == pytest.approx(2.0 / math.pi, abs=1e-3)


def test_poincare_requires_zero_at_origin():
    with pytest.raises(ValueError):
        check_poincare(_field(np.ones_like(GRID)))


def test_linf_constant_equality_edge():
    res = check_linf_interp(_field(np.full_like(GRID, 2.0)))
    assert res["sup_holds"]
    assert res["sup_ratio"] == pytest.approx(1.0, rel=1e-10)


def test_linf_linear_field():
    res = check_linf_interp(_field(GRID))
    assert res["sup_holds"] and res["deriv_holds"]
    # sharper bound for f(0)=0: |f|_inf <= sqrt(2 |f|_2 |f_x|_2)
    f2 = 1.0 / math.sqrt(3.0)
    assert 1.0 <= math.sqrt(2.0 * f2 * 1.0) + 1e-9


def test_inequalities_random_fields():
    rng = np.random.default_rng(20240817)
    slack = 1.0 + 10.0 * H
    for _ in range(100):
        f = _random_smooth_field(rng)
        res = check_linf_interp(f)
        assert res["sup_ratio"] <= slack
        assert res["deriv_ratio"] <= slack
        g = DiscreteField(GRID, f.values - f.values[0])
        assert check_poincare(g)["ratio"] <= 2.0 * slack


def test_cond2_accelerating(accelerating_profile):
    res = cond2_check(accelerating_profile)
    assert res["status"] == "Satisfied"
    assert res["clauses"] == ["P'' > 0"]


def test_cond2_constant_not_applicable(constant_profile):
    assert cond2_check(constant_profile)["status"] == "NotApplicable"


def test_cond2_decelerating_slope_clause(decelerating_profile):
    # for a gamma law the curvature clause P''/P' = (gamma-1)/rho < 2/rho
    # always holds, so the verdict rests entirely on the slope bound
    res = cond2_check(decelerating_profile)
    if res["status"] == "Violated":
        assert res["clause"] == "rho_x < rho/4"


def test_goodman_constant_profile_closed_form(constant_profile):
    # u_x = 0 reduces the weight ODE to phi1' = -delta: phi1 = 1 - delta*x
    delta = 0.25
    pair, report = goodman_weights(constant_profile, delta)
    expected = 1.0 - delta * constant_profile.x
    assert np.allclose(pair.phi1, expected, atol=1e-12)
    assert report["phi1_positive"] and report["quantity_all_negative"]
    u0 = constant_profile.params.u0
    assert report["quantity_max"] == pytest.approx(-delta * u0 / 2.0, rel=1e-6)


def test_goodman_quantity_identity(decelerating_profile):
    # q = (1/2)(u phi1)_x - 2 u_x phi1 collapses to -delta*u/2 along exact
    # solutions of the weight ODE, independent of the profile
    delta = 0.1
    pair, report = goodman_weights(decelerating_profile, delta)
    u = decelerating_profile.u
    q_expected = -0.5 * delta * u
    assert report["quantity_max"] == pytest.approx(
        float(np.max(q_expected)), rel=1e-4)
    assert report["quantity_all_negative"]


def test_goodman_weight_relation_exact(decelerating_profile, law):
    pair, _ = goodman_weights(decelerating_profile, 0.1)
    assert np.allclose(pair.phi1, law.dp(decelerating_profile.rho) * pair.phi2,
                       rtol=1e-14)


def test_goodman_rejects_nonpositive_delta(decelerating_profile):
    with pytest.raises(ValueError):
        goodman_weights(decelerating_profile, 0.0)


@settings(deadline=None, max_examples=20)
@given(seed=st.integers(0, 10_000))
def test_inequality_property_suite(seed):
    rng = np.random.default_rng(seed)
    f = _random_smooth_field(rng)
    slack = 1.0 + 10.0 * H
    res = check_linf_interp(f)
    assert res["sup_ratio"] <= slack
    assert res["deriv_ratio"] <= slack
