import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nschannel.thermo import CallableLaw, GammaLaw, eval_pressure


def test_gamma_law_values():
    law = GammaLaw(kappa=1.0, gamma=1.4)
    assert law.p(1.0) == 1.0
    assert law.dp(1.0) == pytest.approx(1.4)
    assert law.d2p(1.0) == pytest.approx(1.4 * 0.4)
    assert law.p(2.0) == pytest.approx(2.0**1.4)


def test_gamma_law_validation():
    with pytest.raises(ValueError):
        GammaLaw(kappa=0.0)
    with pytest.raises(ValueError):
        GammaLaw(kappa=-1.0)
    with pytest.raises(ValueError):
        GammaLaw(gamma=1.0)
    with pytest.raises(ValueError):
        GammaLaw(gamma=0.5)


def test_eval_pressure_orders():
    law = GammaLaw()
    rho = np.array([0.5, 1.0, 2.0])
    assert np.allclose(eval_pressure(law, rho, 0), law.p(rho))
    assert np.allclose(eval_pressure(law, rho, 1), law.dp(rho))
    assert np.allclose(eval_pressure(law, rho, 2), law.d2p(rho))
    with pytest.raises(ValueError):
        eval_pressure(law, rho, 3)


def test_eval_pressure_rejects_bad_density():
    law = GammaLaw()
    with pytest.raises(ValueError):
        eval_pressure(law, 0.0)
    with pytest.raises(ValueError):
        eval_pressure(law, -1.0)
    with pytest.raises(ValueError):
        eval_pressure(law, math.nan)


def test_callable_law_monotonicity_guard():
    bad = CallableLaw(p_fn=lambda r: -r, dp_fn=lambda r: -np.ones_like(r),
                      d2p_fn=lambda r: np.zeros_like(r))
    with pytest.raises(ValueError):
        bad.dp(np.array([1.0]))
    good = CallableLaw(p_fn=lambda r: r**2, dp_fn=lambda r: 2 * r,
                       d2p_fn=lambda r: 2 * np.ones_like(r))
    assert good.dp(np.array([1.0]))[0] == 2.0


@given(
    kappa=st.floats(0.01, 100.0),
    gamma=st.floats(1.01, 3.0),
    rho=st.floats(1e-3, 1e3),
)
def test_gamma_law_structure(kappa, gamma, rho):
    law = GammaLaw(kappa=kappa, gamma=gamma)
    assert law.p(rho) > 0
    assert law.dp(rho) > 0
    assert law.d2p(rho) > 0  # gamma > 1 makes the law convex


@given(rho=st.floats(0.1, 10.0), factor=st.floats(1.01, 2.0))
def test_pressure_increasing(rho, factor):
    law = GammaLaw()
    assert law.p(rho * factor) > law.p(rho)
