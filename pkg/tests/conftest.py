"""Shared session fixtures: fitted constants, the auxiliary test function,
and the scenario runs reused by module and acceptance tests."""

import numpy as np
import pytest

from fkslab.analysis import build_test_function
from fkslab.inequalities import estimate_gns_constant
from fkslab.runner import preset, run


@pytest.fixture(scope="session")
def chat11():
    return estimate_gns_constant(1.0, 1.0).C_hat


@pytest.fixture(scope="session")
def chat21():
    return estimate_gns_constant(2.0, 1.0).C_hat


@pytest.fixture(scope="session")
def tf_half():
    """Auxiliary test function at alpha = 0.5, beta = 0.75."""
    return build_test_function(0.5, 0.75)


@pytest.fixture(scope="session")
def subcritical_run():
    return run(preset("subcritical-alpha1"))


@pytest.fixture(scope="session")
def supercritical_run():
    return run(preset("supercritical-alpha05"))


@pytest.fixture(scope="session")
def fig1_run():
    return run(preset("fig1-rescaled-subcritical"))


@pytest.fixture(scope="session")
def fig2_run():
    return run(preset("fig2-alpha1-large-mass"))


@pytest.fixture(scope="session")
def cauchy_limit_run():
    return run(preset("pure-diffusion-rescaled"))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240809)
