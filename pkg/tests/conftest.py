import math

import numpy as np
import pytest

from devilstick import FullState, JuggleSpec, StickParams, design_orbit

from refvals import IC


@pytest.fixture(scope="session")
def params():
    return StickParams(m=0.1, ell=0.5)


@pytest.fixture(scope="session")
def spec():
    return JuggleSpec(theta_odd=math.pi / 6, theta_even=5 * math.pi / 6,
                      alpha=0.6131, beta=3.0, lambda_x=0.5, lambda_y=0.5)


@pytest.fixture(scope="session")
def asym_spec():
    return JuggleSpec(theta_odd=math.pi / 6, theta_even=2 * math.pi / 3,
                      alpha=0.6131, beta=3.0, lambda_x=0.5, lambda_y=0.5)


@pytest.fixture(scope="session")
def ic_state():
    return FullState(h=IC[:2], v=IC[3:5], theta=IC[2], omega=IC[5])


@pytest.fixture(scope="session")
def orbit_2p(spec, params):
    """Orbit matching the 2-periodic motion the reference episode settles on."""
    return design_orbit(spec, -3.1596, params)


@pytest.fixture(scope="session")
def orbit_sym(spec, params):
    from devilstick import symmetric_omega_star
    return design_orbit(spec, symmetric_omega_star(spec, params), params)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
