"""Steady solutions of the viscous channel problem.

The steady equations reduce to constant momentum flux rho*u = m together
with a scalar first-order ODE for the density whose integration constant b
is fixed by the outflow velocity. We shoot on b: classical RK4 for the
density ODE, Newton on the mismatch at x=1 with a bracketing-bisection
fallback. For strongly convection-dominated expansive data the forward
shot is exponentially ill-conditioned, so a reversed-direction shot from
the outflow end is used as a rescue path.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BlowUpError,
    NonconvergenceError,
    NSChannelError,
    UnsupportedBoundaryError,
)
from .thermo import PressureLaw

__all__ = [
    "FlowParams",
    "RawBoundary",
    "SteadyProfile",
    "SlopeClass",
    "normalize_bc",
    "integrate_density_ode",
    "phi",
    "solve_steady",
    "classify",
    "sample",
    "reflect_profile",
    "default_node_count",
]

RHO_FLOOR_REL = 1e-8
RHO_CEILING_REL = 1e8
DEFAULT_TOL_BC = 1e-10
DEFAULT_TOL_FLUX = 1e-8
DEFAULT_NODES = 2048


@dataclass(frozen=True)
class FlowParams:
    """Viscosity and canonical (all-positive) boundary data."""

    nu: float
    rho0: float
    u0: float
    u1: float

    def __post_init__(self):
        for name in ("nu", "rho0", "u0", "u1"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite real, got {v!r}")

    @property
    def m(self) -> float:
        """Momentum flux rho0*u0, constant along any steady solution."""
        return self.rho0 * self.u0


@dataclass(frozen=True)
class RawBoundary:
    """Boundary data as given: density on one side, velocities on both."""

    density_side: int  # 0 or 1
    rho: float
    u0: float
    u1: float


def normalize_bc(raw: RawBoundary, nu: float = 1.0) -> tuple[FlowParams, bool]:
    """Map raw boundary data to canonical all-positive form.

    Returns (params, reflected). reflected=True means results must be
    mapped back through x -> 1-x with the velocity negated for reporting.
    Mixed-sign or zero velocities are rejected: the characteristic case
    only produces trivial constant states.
    """
    if raw.u0 == 0 or raw.u1 == 0 or (raw.u0 > 0) != (raw.u1 > 0):
        raise UnsupportedBoundaryError(
            f"velocities must share a strict sign, got u0={raw.u0}, u1={raw.u1}"
        )
    if raw.u0 > 0:
        if raw.density_side != 0:
            raise UnsupportedBoundaryError(
                "positive velocities require the density at x=0"
            )
        return FlowParams(nu=nu, rho0=raw.rho, u0=raw.u0, u1=raw.u1), False
    if raw.density_side != 1:
        raise UnsupportedBoundaryError("negative velocities require the density at x=1")
    # reflect: x -> 1-x swaps the ends and flips the velocity sign
    return FlowParams(nu=nu, rho0=raw.rho, u0=-raw.u1, u1=-raw.u0), True


class SlopeClass(enum.Enum):
    CONSTANT = "Constant"
    POSITIVE_SLOPE = "PositiveSlope"
    NEGATIVE_SLOPE = "NegativeSlope"

    @property
    def label(self) -> str:
        # display terms keyed to sign(u_x); see README note on the naming
        # ambiguity for monotone profiles
        return {
            SlopeClass.CONSTANT: "constant",
            SlopeClass.POSITIVE_SLOPE: "compressive",
            SlopeClass.NEGATIVE_SLOPE: "expansive",
        }[self]


@dataclass(eq=False)
class SteadyProfile:
    """Discretized steady solution on a uniform grid over [0, 1]."""

    x: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    rho_x: np.ndarray
    u_x: np.ndarray
    b: float
    m: float
    params: FlowParams
    law: PressureLaw
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.x) - 1

    @property
    def h(self) -> float:
        return 1.0 / self.n

    def sample(self, x):
        return sample(self, x)


class ProfileConsistencyError(NSChannelError):
    """Profile data contradicts the monotonicity structure of the problem."""


def default_node_count(params: FlowParams) -> int:
    """Grid size scaled with the convection/viscosity ratio so boundary
    layers of width ~ nu/m keep tens of points."""
    n = max(DEFAULT_NODES, int(math.ceil(32.0 * params.m / params.nu)))
    return n + (n % 2)


def _density_rhs(rho: float, b: float, m: float, nu: float, law: PressureLaw) -> float:
    return (b * rho * rho - m * m * rho - rho * rho * law.p(rho)) / (nu * m)


def _rk4_density(
    b: float,
    params: FlowParams,
    law: PressureLaw,
    n: int,
    start: float,
    direction: int = +1,
) -> np.ndarray:
    """RK4-integrate the density ODE across [0,1].

    direction=+1 integrates in x from `start` at x=0; direction=-1
    integrates the reversed equation from `start` at x=1. Raises
    BlowUpError at the first node where the density leaves
    [rho0*1e-8, rho0*1e8].
    """
    if n < 2:
        raise ValueError(f"need at least 2 intervals, got n={n}")
    m, nu = params.m, params.nu
    floor = RHO_FLOOR_REL * params.rho0
    ceiling = RHO_CEILING_REL * params.rho0
    h = direction / n
    out = np.empty(n + 1)
    out[0] = r = start
    p = law.p  # local binding; scalar float math in the hot loop

    def f(rho):
        if not (floor < rho < ceiling):
            raise _StageEscape
        return (b * rho * rho - m * m * rho - rho * rho * p(rho)) / (nu * m)

    for j in range(n):
        try:
            k1 = f(r)
            k2 = f(r + 0.5 * h * k1)
            k3 = f(r + 0.5 * h * k2)
            k4 = f(r + h * k3)
            r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        except _StageEscape:
            raise BlowUpError(
                f"density left [{floor:g}, {ceiling:g}] at node {j + 1}",
                node=j + 1,
                x=(j + 1) / n if direction > 0 else 1.0 - (j + 1) / n,
            ) from None
        if not (floor < r < ceiling) or not math.isfinite(r):
            raise BlowUpError(
                f"density left [{floor:g}, {ceiling:g}] at node {j + 1}",
                node=j + 1,
                x=(j + 1) / n if direction > 0 else 1.0 - (j + 1) / n,
            )
        out[j + 1] = r
    return out


class _StageEscape(Exception):
    pass


def integrate_density_ode(
    b: float, params: FlowParams, law: PressureLaw, n: int
) -> np.ndarray:
    """Density node values of the steady ODE for a trial flux constant b.

    Raises BlowUpError ("b outside the domain of the mismatch map") if the
    solution escapes the admissible density range before x=1.
    """
    return _rk4_density(b, params, law, n, start=params.rho0, direction=+1)


def phi(b: float, params: FlowParams, law: PressureLaw, n: int) -> float:
    """Outflow mismatch rho(1) - m/u1; increasing in b where defined."""
    rho = integrate_density_ode(b, params, law, n)
    return float(rho[-1]) - params.m / params.u1


def _phi_signed(b, params, law, n):
    """phi with blow-ups mapped to +/- infinity for bracketing purposes."""
    try:
        return phi(b, params, law, n)
    except BlowUpError:
        return math.inf if _escapes_high(b, params, law) else -math.inf


def _escapes_high(b, params, law) -> bool:
    # Classify which end of the admissible range the shot escaped through.
    # An upward escape requires the right-hand side to be positive at the
    # ceiling density; otherwise the density can only have run down to the
    # floor.
    ceiling = RHO_CEILING_REL * params.rho0
    m = params.m
    return ceiling * (b - law.p(ceiling)) - m * m > 0


def _bracket_and_bisect(params, law, n, tol_bc, budget):
    """Find b with |phi(b)| <= tol_bc by geometric bracket expansion plus
    bisection; returns (b, phi(b), evals_used). May stop at float
    resolution with |phi| > tol_bc (caller decides what to do)."""
    rho0, u0, u1 = params.rho0, params.u0, params.u1
    b0 = rho0 * u0 * u0 + law.p(rho0)
    f0 = _phi_signed(b0, params, law, n)
    evals = 1
    if f0 == 0.0:
        return b0, 0.0, evals
    delta = 0.125 * max(1.0, abs(b0))
    if f0 > 0:
        lo_sign_b, hi_sign_b, f_hi = None, b0, f0
        b = b0
        while evals < budget:
            b = b - delta
            fb = _phi_signed(b, params, law, n)
            evals += 1
            if fb <= 0:
                lo_sign_b, f_lo = b, fb
                break
            hi_sign_b, f_hi = b, fb
            delta *= 2.0
        else:
            raise NonconvergenceError("bracket expansion budget exhausted")
    else:
        lo_sign_b, f_lo = b0, f0
        b = b0
        while evals < budget:
            b = b + delta
            fb = _phi_signed(b, params, law, n)
            evals += 1
            if fb >= 0:
                hi_sign_b, f_hi = b, fb
                break
            lo_sign_b, f_lo = b, fb
            delta *= 2.0
        else:
            raise NonconvergenceError("bracket expansion budget exhausted")
    # bisection: phi is increasing, lo has phi<=0, hi has phi>=0
    b_lo, b_hi = lo_sign_b, hi_sign_b
    best_b, best_f = (b_lo, f_lo) if abs(f_lo) < abs(f_hi) else (b_hi, f_hi)
    while evals < budget:
        mid = 0.5 * (b_lo + b_hi)
        if mid == b_lo or mid == b_hi:  # float resolution reached
            break
        fm = _phi_signed(mid, params, law, n)
        evals += 1
        if math.isfinite(fm) and abs(fm) < abs(best_f):
            best_b, best_f = mid, fm
        if abs(best_f) <= tol_bc:
            return best_b, best_f, evals
        if fm < 0:
            b_lo = mid
        else:
            b_hi = mid
    return best_b, best_f, evals


def _newton(b_start, params, law, n, tol_bc, budget):
    """Newton iteration on phi with one-sided FD derivative. Returns
    (b, phi(b), evals) or raises BlowUpError/NonconvergenceError."""
    b = b_start
    evals = 0
    f = phi(b, params, law, n)
    evals += 1
    best_b, best_f = b, f
    for _ in range(40):
        if abs(best_f) <= tol_bc:
            return best_b, best_f, evals
        step_h = 1e-7 * max(1.0, abs(b))
        f2 = phi(b + step_h, params, law, n)
        evals += 1
        d = (f2 - f) / step_h
        if not math.isfinite(d) or d <= 0:
            raise NonconvergenceError("Newton derivative degenerate")
        b_new = b - f / d
        f_new = phi(b_new, params, law, n)
        evals += 1
        if abs(f_new) < abs(best_f):
            best_b, best_f = b_new, f_new
        if abs(f_new) >= abs(f) and abs(f_new) > tol_bc:
            # stalled
            raise NonconvergenceError("Newton stalled", bracket=(b, b_new))
        b, f = b_new, f_new
        if evals > budget:
            break
    if abs(best_f) <= tol_bc:
        return best_b, best_f, evals
    raise NonconvergenceError("Newton budget exhausted", bracket=(best_b, best_f))


def _solve_b_backward(params, law, n, tol_bc, budget):
    """Reversed-direction shot: integrate from the known outflow density
    back to x=0 and match rho0 there. Returns (b, rho array in x-order).

    The mismatch is decreasing in b in this direction.
    """
    m, u1, rho0 = params.m, params.u1, params.rho0
    target_start = m / u1

    def psi_signed(b):
        try:
            arr = _rk4_density(b, params, law, n, start=target_start, direction=-1)
            return float(arr[-1]) - rho0, arr
        except BlowUpError:
            # the reversed flow can only escape upward (it moves away from
            # the floor), and it does so when b is too small
            return math.inf, None

    b0 = rho0 * params.u0**2 + law.p(rho0)
    f0, arr0 = psi_signed(b0)
    evals = 1
    if f0 == 0.0 and arr0 is not None:
        return b0, arr0[::-1].copy()
    delta = 0.125 * max(1.0, abs(b0))
    # psi is decreasing in b: positive mismatch means b must grow
    lo = hi = None  # psi(lo) >= 0 >= psi(hi)
    b = b0
    if f0 > 0:
        lo = b0
        while evals < budget:
            b = b + delta
            fb, arr = psi_signed(b)
            evals += 1
            if fb <= 0:
                hi = b
                break
            lo = b
            delta *= 2.0
    else:
        hi = b0
        while evals < budget:
            b = b - delta
            fb, arr = psi_signed(b)
            evals += 1
            if fb >= 0:
                lo = b
                break
            hi = b
            delta *= 2.0
    if lo is None or hi is None:
        raise NonconvergenceError("backward bracket budget exhausted")
    # bisect: psi(lo) >= 0 >= psi(hi)
    best = None
    while evals < budget:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm, arr = psi_signed(mid)
        evals += 1
        if arr is not None and (best is None or abs(fm) < abs(best[1])):
            best = (mid, fm, arr)
        if best is not None and abs(best[1]) <= tol_bc:
            break
        if fm > 0:
            lo = mid
        else:
            hi = mid
    if best is None:
        raise NonconvergenceError("backward shot found no admissible b",
                                  bracket=(lo, hi))
    b_star, f_star, arr = best
    if abs(f_star) > tol_bc:
        raise NonconvergenceError(
            f"backward shot mismatch {f_star:.3e} above tol {tol_bc:g}",
            bracket=(lo, hi),
        )
    rho = arr[::-1].copy()
    rho[0] = params.rho0  # snap the matched end (within tol_bc already)
    return b_star, rho


def _profile_from_density(rho, b, params, law) -> SteadyProfile:
    n = len(rho) - 1
    x = np.linspace(0.0, 1.0, n + 1)
    m = params.m
    u = m / rho
    p_vals = np.asarray(law.p(rho), dtype=float)
    rho_x = (b * rho**2 - m * m * rho - rho**2 * p_vals) / (params.nu * m)
    u_x = -m * rho_x / rho**2
    return SteadyProfile(
        x=x, rho=rho, u=u, rho_x=rho_x, u_x=u_x,
        b=float(b), m=float(m), params=params, law=law,
    )


def solve_steady(
    params: FlowParams,
    law: PressureLaw,
    n: int | None = None,
    tol_bc: float = DEFAULT_TOL_BC,
    budget: int = 400,
) -> SteadyProfile:
    """Compute the steady profile by shooting on the flux constant.

    Newton from b0 = rho0*u0^2 + P(rho0) with a bisection fallback; for
    nu <= 1 a bisection phase primes Newton because b0 is a poor start in
    the convection-dominated regime. A reversed-direction shot rescues
    expansive cases where forward shooting is too ill-conditioned.
    """
    if n is None:
        n = default_node_count(params)
    rho0, u0, u1 = params.rho0, params.u0, params.u1
    b0 = rho0 * u0 * u0 + law.p(rho0)
    if u0 == u1:
        rho = np.full(n + 1, float(rho0))
        return _profile_from_density(rho, b0, params, law)

    b_star = None
    if params.nu > 1.0:
        try:
            b_star, f_star, _ = _newton(b0, params, law, n, tol_bc, budget)
        except (BlowUpError, NonconvergenceError):
            b_star = None
    if b_star is None:
        try:
            b_star, f_star, used = _bracket_and_bisect(params, law, n, tol_bc, budget)
            if abs(f_star) > tol_bc:
                # polish with Newton from the bisection point
                b_star, f_star, _ = _newton(
                    b_star, params, law, n, tol_bc, budget - used
                )
        except (BlowUpError, NonconvergenceError):
            b_star = None
        else:
            if abs(f_star) > tol_bc:
                b_star = None
    if b_star is not None:
        rho = integrate_density_ode(b_star, params, law, n)
        return _profile_from_density(rho, b_star, params, law)

    # forward shot unusable: reversed-direction rescue
    b_star, rho = _solve_b_backward(params, law, n, tol_bc, budget)
    return _profile_from_density(rho, b_star, params, law)


def classify(profile: SteadyProfile, tol_flux: float = DEFAULT_TOL_FLUX) -> SlopeClass:
    """Classify the profile by the sign of the velocity slope."""
    ux = profile.u_x
    if np.max(np.abs(ux)) <= tol_flux:
        return SlopeClass.CONSTANT
    if np.all(ux > 0):
        return SlopeClass.POSITIVE_SLOPE
    if np.all(ux < 0):
        return SlopeClass.NEGATIVE_SLOPE
    raise ProfileConsistencyError(
        "velocity slope changes sign along the profile; this contradicts the "
        "monotone structure of steady solutions"
    )


def sample(profile: SteadyProfile, x):
    """Cubic Hermite interpolation of (rho, u, rho_x, u_x) at x in [0,1].

    Density uses node values plus ODE-consistent derivatives; velocity and
    its slope are derived from the constant momentum flux so the sampled
    tuple satisfies the same algebraic relations as the nodes.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0) or np.any(x_arr > 1.0):
        raise ValueError(f"sample points must lie in [0,1], got {x!r}")
    n = profile.n
    h = profile.h
    i = np.clip((x_arr / h).astype(int), 0, n - 1)
    t = x_arr / h - i
    r0 = profile.rho[i]
    r1 = profile.rho[i + 1]
    d0 = profile.rho_x[i]
    d1 = profile.rho_x[i + 1]
    t2 = t * t
    t3 = t2 * t
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + t
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    rho = h00 * r0 + h * h10 * d0 + h01 * r1 + h * h11 * d1
    dh00 = 6 * t2 - 6 * t
    dh10 = 3 * t2 - 4 * t + 1
    dh01 = -6 * t2 + 6 * t
    dh11 = 3 * t2 - 2 * t
    rho_x = (dh00 * r0 + h * dh10 * d0 + dh01 * r1 + h * dh11 * d1) / h
    # exact node hits reproduce stored values bit-for-bit
    exact = t == 0.0
    if np.any(exact):
        rho = np.where(exact, r0, rho)
        rho_x = np.where(exact, d0, rho_x)
    u = profile.m / rho
    u_x = -profile.m * rho_x / rho**2
    if x_arr.ndim == 0:
        return float(rho), float(u), float(rho_x), float(u_x)
    return rho, u, rho_x, u_x


def reflect_profile(profile: SteadyProfile) -> dict:
    """Arrays of the reflected problem (x -> 1-x, velocity negated), for
    reporting solutions of the mirrored boundary pattern."""
    return {
        "x": profile.x.copy(),
        "rho": profile.rho[::-1].copy(),
        "u": -profile.u[::-1].copy(),
        "rho_x": -profile.rho_x[::-1].copy(),
        "u_x": profile.u_x[::-1].copy(),
    }
