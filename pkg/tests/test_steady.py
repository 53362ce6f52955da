import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nschannel.errors import UnsupportedBoundaryError
from nschannel.steady import (
    FlowParams,
    RawBoundary,
    SlopeClass,
    classify,
    normalize_bc,
    reflect_profile,
    sample,
    solve_steady,
)
from nschannel.thermo import GammaLaw

# flux constants found by the shooting solver and frozen; they are also
# re-derivable from the profile itself (b = rho*u^2 + P(rho) at any node),
# which test_flux_reconstruction checks independently
B_ACCELERATING = 16.5220389381134
B_DECELERATING = 7.804727887571462


def test_accelerating_endpoint_and_flux(accelerating_profile):
    p = accelerating_profile
    assert abs(p.rho[-1] - p.m / p.params.u1) <= 1e-10
    flux = p.rho * p.u
    assert np.max(np.abs(flux - p.m)) <= 1e-8
    assert p.b == pytest.approx(B_ACCELERATING, abs=1e-9)
    assert classify(p) is SlopeClass.POSITIVE_SLOPE
    assert np.all(p.rho_x < 0)  # u up means rho down


def test_decelerating_endpoint_and_flux(decelerating_profile):
    p = decelerating_profile
    assert abs(p.rho[-1] - p.m / p.params.u1) <= 1e-10
    flux = p.rho * p.u
    assert np.max(np.abs(flux - p.m)) <= 1e-8
    assert p.b == pytest.approx(B_DECELERATING, abs=1e-9)
    assert classify(p) is SlopeClass.NEGATIVE_SLOPE
    assert np.all(p.rho_x > 0)


def test_flux_reconstruction(accelerating_profile, decelerating_profile, law):
    # rho*u^2 + P(rho) - nu*u_x must reproduce the solver's flux constant
    # at every node: an oracle independent of the shooting iteration
    for p in (accelerating_profile, decelerating_profile):
        recon = p.rho * p.u**2 + law.p(p.rho) - p.params.nu * p.u_x
        assert np.max(np.abs(recon - p.b)) <= 1e-7 * max(1.0, abs(p.b))


def test_constant_case_exact(constant_profile):
    p = constant_profile
    assert np.all(p.rho == p.rho[0])
    assert np.all(p.u == p.params.u0)
    assert np.all(p.rho_x == 0.0)
    assert classify(p) is SlopeClass.CONSTANT


def test_solver_runtime(law):
    for fp in (FlowParams(1.0, 3.0, 2.0, 3.0), FlowParams(1.0, 2.0, 1.5, 1.0)):
        t0 = time.perf_counter()
        solve_steady(fp, law)
        assert time.perf_counter() - t0 < 1.0


def test_density_monotone(accelerating_profile, decelerating_profile):
    assert np.all(np.diff(accelerating_profile.rho) < 0)
    assert np.all(np.diff(decelerating_profile.rho) > 0)


def test_sample_hits_nodes_exactly(decelerating_profile):
    p = decelerating_profile
    idx = np.array([0, 1, 7, p.n // 2, p.n - 1])
    rho, u, rho_x, u_x = sample(p, p.x[idx])
    assert np.array_equal(rho, p.rho[idx])
    assert np.array_equal(rho_x, p.rho_x[idx])
    assert np.array_equal(u, p.u[idx])


def test_sample_between_nodes(decelerating_profile):
    p = decelerating_profile
    xs = np.linspace(0.013, 0.987, 41)
    rho, u, rho_x, u_x = sample(p, xs)
    assert np.all(rho > 0)
    assert np.allclose(rho * u, p.m, rtol=1e-14)
    # interpolant stays within the node range of this monotone profile
    assert np.all(rho >= p.rho[0] - 1e-12) and np.all(rho <= p.rho[-1] + 1e-12)
    with pytest.raises(ValueError):
        sample(p, 1.5)


def test_normalize_bc_forward():
    params, reflected = normalize_bc(
        RawBoundary(density_side=0, rho=2.0, u0=1.5, u1=1.0), nu=0.5
    )
    assert not reflected
    assert params == FlowParams(nu=0.5, rho0=2.0, u0=1.5, u1=1.0)


def test_normalize_bc_reflected():
    params, reflected = normalize_bc(
        RawBoundary(density_side=1, rho=2.0, u0=-1.0, u1=-1.5), nu=1.0
    )
    assert reflected
    assert params == FlowParams(nu=1.0, rho0=2.0, u0=1.5, u1=1.0)


def test_normalize_bc_rejects_characteristic():
    with pytest.raises(UnsupportedBoundaryError):
        normalize_bc(RawBoundary(density_side=0, rho=1.0, u0=0.0, u1=1.0))
    with pytest.raises(UnsupportedBoundaryError):
        normalize_bc(RawBoundary(density_side=0, rho=1.0, u0=-1.0, u1=1.0))
    with pytest.raises(UnsupportedBoundaryError):
        normalize_bc(RawBoundary(density_side=1, rho=1.0, u0=1.0, u1=1.0))


def test_reflect_profile_roundtrip(decelerating_profile):
    p = decelerating_profile
    r = reflect_profile(p)
    assert r["rho"][0] == p.rho[-1]
    assert r["u"][0] == -p.u[-1]
    # reflected flux is -m and constant
    assert np.allclose(r["rho"] * r["u"], -p.m, rtol=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        FlowParams(nu=0.0, rho0=1.0, u0=1.0, u1=1.0)
    with pytest.raises(ValueError):
        FlowParams(nu=1.0, rho0=-1.0, u0=1.0, u1=1.0)
    with pytest.raises(ValueError):
        FlowParams(nu=1.0, rho0=1.0, u0=math.inf, u1=1.0)


def test_stiff_low_viscosity(law):
    p = solve_steady(FlowParams(nu=0.1, rho0=2.0, u0=1.5, u1=1.0), law)
    assert abs(p.rho[-1] - p.m / p.params.u1) <= 1e-10
    assert np.max(np.abs(p.rho * p.u - p.m)) <= 1e-8


@settings(deadline=None, max_examples=25)
@given(
    nu=st.floats(0.3, 5.0),
    rho0=st.floats(0.5, 5.0),
    u0=st.floats(0.5, 5.0),
    ratio=st.floats(0.4, 2.5),
)
def test_solver_properties(nu, rho0, u0, ratio):
    law = GammaLaw()
    params = FlowParams(nu=nu, rho0=rho0, u0=u0, u1=u0 * ratio)
    p = solve_steady(params, law)
    assert abs(p.rho[-1] - p.m / params.u1) <= 1e-9 * max(1.0, p.m / params.u1)
    assert np.max(np.abs(p.rho * p.u - p.m)) <= 1e-7 * max(1.0, p.m)
    assert np.all(p.rho > 0)
    # velocity between its boundary values (monotone profiles)
    lo, hi = sorted((params.u0, params.u1))
    assert np.all(p.u >= lo - 1e-9) and np.all(p.u <= hi + 1e-9)
