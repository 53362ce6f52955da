"""Discrete norms, functional-inequality self-tests, a structural
condition classifier, and weighted-energy weight construction.

The inequality checks exercise on discrete fields the estimates that the
stability analysis relies on; they are numerical sanity tests, not
proofs. All operations are pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .steady import SlopeClass, SteadyProfile, classify
from .thermo import PressureLaw

__all__ = [
    "DiscreteField",
    "WeightPair",
    "norm",
    "check_poincare",
    "check_linf_interp",
    "cond2_check",
    "goodman_weights",
    "LINF_DERIVATIVE_CONSTANT",
]

# Constant C in the derivative-interpolation bound
#   |v_x|_2^2 <= C |v|_2^2 + C |v|_2 |v_xx|_2.
# Integrating v_x^2 by parts gives |v_x|_2^2 = [v v_x] - (v, v_xx), and the
# boundary term is bounded by 2|v_x|_inf |v|_inf with each sup-norm expanded
# through |f|_inf <= |f|_2 + sqrt(2 |f|_2 |f_x|_2); absorbing the resulting
# |v_x|-terms with Young's inequality yields a bound of this shape with
# C = 8, which randomized testing confirms with large margin.
LINF_DERIVATIVE_CONSTANT = 8.0


@dataclass(frozen=True)
class DiscreteField:
    """Real samples on the uniform grid over [0, 1]."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values must have equal length")
        if len(self.grid) < 4:
            raise ValueError("need at least 4 nodes")

    @property
    def h(self) -> float:
        return float(self.grid[1] - self.grid[0])


@dataclass(frozen=True)
class WeightPair:
    """Positive weights with phi1 = P'(rho_hat) * phi2 nodewise."""

    phi1: np.ndarray
    phi2: np.ndarray
    delta: float


def _diff(values: np.ndarray, h: float) -> np.ndarray:
    """Second-order first difference (centered inside, one-sided at ends)."""
    return np.gradient(values, h, edge_order=2)


def _l2(values: np.ndarray, h: float) -> float:
    return math.sqrt(float(np.trapezoid(values * values, dx=h)))


def norm(field: DiscreteField, k: int = 0) -> float:
    """Discrete Sobolev norm: root-sum-squared trapezoidal L2 norms of the
    field and its finite differences up to order k (k <= 3)."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"order must be in 0..3, got {k}")
    if len(field.values) < k + 2:
        raise ValueError(f"too few nodes ({len(field.values)}) for order {k}")
    h = field.h
    total = 0.0
    vals = np.asarray(field.values, dtype=float)
    for _ in range(k + 1):
        total += _l2(vals, h) ** 2
        vals = _diff(vals, h)
    return math.sqrt(total)


def check_poincare(field: DiscreteField) -> dict:
    """Check |f|_2 <= 2 |f_x|_2 for fields vanishing at x=0."""
    if abs(field.values[0]) > 1e-12 * max(1.0, float(np.max(np.abs(field.values)))):
        raise ValueError("field must vanish at x = 0")
    h = field.h
    f2 = _l2(field.values, h)
    fx2 = _l2(_diff(field.values, h), h)
    if f2 == 0.0:
        return {"holds": True, "ratio": 0.0}
    ratio = f2 / fx2 if fx2 > 0 else math.inf
    return {"holds": ratio <= 2.0, "ratio": ratio}


def check_linf_interp(field: DiscreteField) -> dict:
    """Check the sup-norm interpolation bound
    |f|_inf <= |f|_2 + sqrt(2 |f|_2 |f_x|_2) and the derivative bound
    |v_x|_2^2 <= C (|v|_2^2 + |v|_2 |v_xx|_2) with C = 8."""
    h = field.h
    vals = np.asarray(field.values, dtype=float)
    fx = _diff(vals, h)
    fxx = _diff(fx, h)
    f2, fx2, fxx2 = _l2(vals, h), _l2(fx, h), _l2(fxx, h)
    finf = float(np.max(np.abs(vals)))
    sup_bound = f2 + math.sqrt(2.0 * f2 * fx2)
    C = LINF_DERIVATIVE_CONSTANT
    deriv_bound = C * f2 * f2 + C * f2 * fxx2
    return {
        "sup_holds": finf <= sup_bound or math.isclose(finf, sup_bound, rel_tol=1e-12),
        "sup_ratio": finf / sup_bound if sup_bound > 0 else 0.0,
        "deriv_holds": fx2 * fx2 <= deriv_bound
        or math.isclose(fx2 * fx2, deriv_bound, rel_tol=1e-12),
        "deriv_ratio": fx2 * fx2 / deriv_bound if deriv_bound > 0 else 0.0,
    }


def cond2_check(profile: SteadyProfile, law: PressureLaw | None = None) -> dict:
    """Classify whether the structural condition for the weighted-energy
    argument holds along the profile.

    Increasing-velocity profiles need P''(rho_hat) > 0 everywhere;
    decreasing-velocity profiles need P''/P' < 2/rho_hat and
    rho_hat_x < rho_hat/4 everywhere (the slope bound is applied to the
    signed derivative, which is the literal form of the condition).
    """
    law = law or profile.law
    slope = classify(profile)
    if slope is SlopeClass.CONSTANT:
        return {"status": "NotApplicable", "reason": "constant profile"}
    rho = profile.rho
    if slope is SlopeClass.POSITIVE_SLOPE:
        d2 = np.asarray(law.d2p(rho), dtype=float)
        bad = np.nonzero(~(d2 > 0))[0]
        if len(bad):
            return {"status": "Violated", "node": int(bad[0]),
                    "clause": "P'' > 0"}
        return {"status": "Satisfied", "clauses": ["P'' > 0"]}
    ratio = np.asarray(law.d2p(rho), dtype=float) / np.asarray(
        law.dp(rho), dtype=float
    )
    bad = np.nonzero(~(ratio < 2.0 / rho))[0]
    if len(bad):
        return {"status": "Violated", "node": int(bad[0]),
                "clause": "P''/P' < 2/rho"}
    bad = np.nonzero(~(profile.rho_x < rho / 4.0))[0]
    if len(bad):
        return {"status": "Violated", "node": int(bad[0]),
                "clause": "rho_x < rho/4"}
    return {"status": "Satisfied",
            "clauses": ["P''/P' < 2/rho", "rho_x < rho/4"]}


def goodman_weights(
    profile: SteadyProfile, delta: float | None = None, law: PressureLaw | None = None
) -> tuple[WeightPair, dict]:
    """Integrate the weight ODE u*phi1' = 3*u_x*phi1 - delta*u from
    phi1(0)=1 on the profile grid, set phi2 = phi1/P'(rho_hat), and report
    the sign checks the weighted energy estimate needs.

    The reported quantity q = (1/2)(u*phi1)_x - 2*u_x*phi1 reduces
    algebraically to -delta*u/2 along exact solutions of the ODE, so on a
    fine grid it is negative whenever u > 0; the report records the
    computed nodewise values rather than asserting the identity.
    """
    law = law or profile.law
    if delta is None:
        delta = 0.1 * float(np.min(profile.u))
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    x, u, u_x = profile.x, profile.u, profile.u_x
    n = profile.n
    h = profile.h

    # RK4 on phi' = (3 u_x/u) phi - delta, with midpoint coefficients from
    # linear interpolation of the profile samples
    coef = 3.0 * u_x / u
    phi1 = np.empty(n + 1)
    phi1[0] = 1.0
    for i in range(n):
        c0, c1 = coef[i], coef[i + 1]
        cm = 0.5 * (c0 + c1)
        y = phi1[i]
        k1 = c0 * y - delta
        k2 = cm * (y + 0.5 * h * k1) - delta
        k3 = cm * (y + 0.5 * h * k2) - delta
        k4 = c1 * (y + h * k3) - delta
        phi1[i + 1] = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    dp = np.asarray(law.dp(profile.rho), dtype=float)
    phi2 = phi1 / dp
    quantity = 0.5 * np.gradient(u * phi1, x, edge_order=2) - 2.0 * u_x * phi1
    report = {
        "delta": delta,
        "phi1_positive": bool(np.all(phi1 > 0)),
        "phi2_positive": bool(np.all(phi2 > 0)),
        "quantity_max": float(np.max(quantity)),
        "quantity_all_negative": bool(np.all(quantity < 0)),
    }
    if not report["phi1_positive"]:
        report["first_nonpositive_node"] = int(np.nonzero(~(phi1 > 0))[0][0])
    return WeightPair(phi1=phi1, phi2=phi2, delta=delta), report
