import pytest

from nschannel.steady import FlowParams, solve_steady
from nschannel.thermo import GammaLaw


@pytest.fixture(scope="session")
def law():
    return GammaLaw(kappa=1.0, gamma=1.4)


@pytest.fixture(scope="session")
def accelerating_profile(law):
    """u rises 2 -> 3 along the channel; density falls 3 -> 2."""
    return solve_steady(FlowParams(nu=1.0, rho0=3.0, u0=2.0, u1=3.0), law)


@pytest.fixture(scope="session")
def decelerating_profile(law):
    """u falls 1.5 -> 1 along the channel; density rises 2 -> 3."""
    return solve_steady(FlowParams(nu=1.0, rho0=2.0, u0=1.5, u1=1.0), law)


@pytest.fixture(scope="session")
def constant_profile(law):
    return solve_steady(FlowParams(nu=1.0, rho0=2.0, u0=1.5, u1=1.5), law)
