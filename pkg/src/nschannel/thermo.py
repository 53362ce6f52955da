"""Pressure laws for isentropic gas dynamics.

A pressure law maps density to pressure and exposes the first two
derivatives, which the linearized problem needs. The only built-in law is
the gamma-law P(rho) = kappa * rho**gamma; arbitrary smooth laws can be
wrapped with :class:`CallableLaw` (useful for probing condition checks
with P'' < 0).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["PressureLaw", "GammaLaw", "CallableLaw", "eval_pressure"]


class PressureLaw:
    """Smooth pressure law rho -> P(rho) with P' > 0 on the visited range."""

    def p(self, rho):
        raise NotImplementedError

    def dp(self, rho):
        raise NotImplementedError

    def d2p(self, rho):
        raise NotImplementedError

    def __call__(self, rho, order: int = 0):
        return eval_pressure(self, rho, order)


@dataclass(frozen=True)
class GammaLaw(PressureLaw):
    """P(rho) = kappa * rho**gamma with kappa > 0 and gamma > 1."""

    kappa: float = 1.0
    gamma: float = 1.4

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")

    def p(self, rho):
        return self.kappa * rho**self.gamma

    def dp(self, rho):
        return self.kappa * self.gamma * rho ** (self.gamma - 1.0)

    def d2p(self, rho):
        return self.kappa * self.gamma * (self.gamma - 1.0) * rho ** (self.gamma - 2.0)


@dataclass(frozen=True)
class CallableLaw(PressureLaw):
    """Wrap explicit callables for P, P', P''.

    No structural guarantees: P' > 0 is only checked lazily on the densities
    actually evaluated, which is all one can do for a black-box law.
    """

    p_fn: Callable
    dp_fn: Callable
    d2p_fn: Callable
    check_monotone: bool = True

    def p(self, rho):
        return self.p_fn(rho)

    def dp(self, rho):
        out = self.dp_fn(rho)
        if self.check_monotone and np.any(np.asarray(out) <= 0):
            raise ValueError("pressure law violates P' > 0 on visited densities")
        return out

    def d2p(self, rho):
        return self.d2p_fn(rho)


def eval_pressure(law: PressureLaw, rho, order: int = 0):
    """Evaluate P, P' or P'' at rho (scalar or array), requiring rho > 0."""
    arr = np.asarray(rho)
    if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise ValueError(f"density must be positive and finite, got {rho!r}")
    if order == 0:
        return law.p(rho)
    if order == 1:
        return law.dp(rho)
    if order == 2:
        return law.d2p(rho)
    raise ValueError(f"order must be 0, 1 or 2, got {order}")
