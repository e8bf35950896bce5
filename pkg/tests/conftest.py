import numpy as np
import pytest
from hypothesis import strategies as st

from optomech_epr.model import SystemModel, drift_matrix_full, is_stable_eigen
from optomech_epr.presets import reference_model


@pytest.fixture
def ref():
    """Two resonators at 1 +- 0.01, 10 dB source with r_plus = 1.4."""
    return reference_model()


def random_model(rng, n_modes=2, stable=True, max_tries=200):
    """Random model drawn from broad, physically sensible ranges."""
    for _ in range(max_tries):
        kappa_c = rng.uniform(0.2, 2.0)
        kappa_a = rng.uniform(0.02, 2.0)
        m = SystemModel.build(
            kappa_a=kappa_a,
            kappa_a_prime=rng.uniform(0.0, 0.3) * kappa_a,
            omega=rng.uniform(0.5, 1.5, n_modes),
            G=rng.uniform(0.0, 0.3, n_modes),
            chi=rng.uniform(0.0, 0.9) * kappa_c,
            kappa_c=kappa_c,
            kappa_c_prime=rng.uniform(0.0, 0.3) * kappa_c,
            epsilon_L=rng.uniform(0.5, 1.5),
            epsilon_a=rng.uniform(-0.5, 0.5),
            gamma=rng.uniform(1e-5, 1e-2, n_modes),
            n_T=rng.uniform(0.0, 20.0, n_modes),
        )
        if not stable or is_stable_eigen(drift_matrix_full(m)):
            return m
    raise RuntimeError("no stable model drawn")


@st.composite
def stable_models(draw, n_modes=2):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_model(np.random.default_rng(seed), n_modes=n_modes)
