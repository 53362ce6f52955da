import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nschannel.evans import (
    evans,
    evans_at_zero_log,
    evans_at_zero_quadrature,
    evans_many,
    stability_index,
)
from nschannel.steady import FlowParams, solve_steady
from nschannel.thermo import GammaLaw

# log D(0) computed by the independent quadrature reduction (the ODE at
# lambda=0 integrates in closed form up to one cumulative quadrature) and
# frozen; the shooting integrator must reproduce them
LOG_D0_ACCELERATING = 2.2895406398513893
LOG_D0_DECELERATING = -0.9960530891779155
LOG_D0_CONSTANT = 0.28044228940548654


def _log_abs(ev):
    return math.log(abs(ev.d_scaled)) + ev.log_scale


def test_zero_mode_frozen_values(accelerating_profile, decelerating_profile,
                                 constant_profile):
    assert evans_at_zero_log(accelerating_profile) == pytest.approx(
        LOG_D0_ACCELERATING, abs=1e-10)
    assert evans_at_zero_log(decelerating_profile) == pytest.approx(
        LOG_D0_DECELERATING, abs=1e-10)
    assert evans_at_zero_log(constant_profile) == pytest.approx(
        LOG_D0_CONSTANT, abs=1e-10)


def test_constant_profile_closed_form(constant_profile):
    # for a constant profile the lambda=0 mode solves a constant-coefficient
    # ODE: v(1) = (e^c - 1)/c with c = (rho*u - P'(rho)*rho/u)/nu
    p = constant_profile.params
    law = constant_profile.law
    c = (p.rho0 * p.u0 - law.dp(p.rho0) * p.rho0 / p.u0) / p.nu
    expected = (math.exp(c) - 1.0) / c
    got = math.exp(evans_at_zero_log(constant_profile))
    assert got == pytest.approx(expected, rel=1e-12)


def test_shooting_matches_quadrature(accelerating_profile,
                                     decelerating_profile, constant_profile):
    for prof in (accelerating_profile, decelerating_profile, constant_profile):
        shoot = _log_abs(evans(0.0, prof))
        quad = evans_at_zero_log(prof)
        # compare as values, not logs: |exp(diff) - 1| is the relative error
        assert abs(math.expm1(shoot - quad)) <= 1e-8


def test_quadrature_plain_value(decelerating_profile):
    v = evans_at_zero_quadrature(decelerating_profile)
    assert v == pytest.approx(math.exp(LOG_D0_DECELERATING), rel=1e-10)


def test_conjugation_symmetry(decelerating_profile):
    for lam in (0.3 + 1.7j, 2.0 - 5.0j, 1e-3 + 1e-3j):
        a = evans(lam, decelerating_profile)
        b = evans(np.conj(lam), decelerating_profile)
        assert b.d_scaled == pytest.approx(np.conj(a.d_scaled), rel=1e-12)
        assert b.log_scale == pytest.approx(a.log_scale, rel=1e-12)


def test_batch_matches_scalar(decelerating_profile):
    lams = np.array([0.1 + 0.2j, -0.5 + 3.0j, 4.0 + 0.0j, 0.0 + 9.0j])
    d_batch, s_batch = evans_many(lams, decelerating_profile)
    for k, lam in enumerate(lams):
        ev = evans(complex(lam), decelerating_profile)
        assert d_batch[k] == pytest.approx(ev.d_scaled, rel=1e-10)
        assert s_batch[k] == pytest.approx(ev.log_scale, rel=1e-10)


def test_scaled_value_normalized(decelerating_profile):
    ev = evans(1.0 + 2.0j, decelerating_profile)
    assert abs(ev.d_scaled) == pytest.approx(1.0, rel=1e-12)


def test_stability_index_reference_profiles(accelerating_profile,
                                            decelerating_profile,
                                            constant_profile):
    for prof in (accelerating_profile, decelerating_profile, constant_profile):
        si = stability_index(prof)
        assert si.product == 1
        assert si.sign_zero == si.sign_infinity


@settings(deadline=None, max_examples=15)
@given(
    nu=st.floats(0.3, 5.0),
    rho0=st.floats(0.7, 4.0),
    u0=st.floats(0.7, 4.0),
    ratio=st.floats(0.5, 2.0),
)
def test_oracle_agreement_random(nu, rho0, u0, ratio):
    law = GammaLaw()
    prof = solve_steady(FlowParams(nu=nu, rho0=rho0, u0=u0, u1=u0 * ratio), law)
    shoot = _log_abs(evans(0.0, prof))
    quad = evans_at_zero_log(prof)
    assert abs(math.expm1(shoot - quad)) <= 1e-8
