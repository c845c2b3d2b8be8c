"""Shared fixtures: reference models and a randomized stable-model factory."""
import numpy as np
import pytest

from gica.simulate import SimSpec, build_true_model
from gica.varmodel import BivariateVarModel, companion_matrix


@pytest.fixture(scope="session")
def reference_model():
    """Open-loop model with strong target dynamics (b = 1) and mid coupling (c = 0.5)."""
    return build_true_model(SimSpec(system="open_loop", n=10, seed=0, b=1.0, c=0.5))


def make_random_stable_model(rng, p=None, radius=None):
    """Draw a random bivariate AR model and rescale its lags to a target radius.

    Scaling A_k by s**k multiplies every companion eigenvalue by s, so the
    spectral radius can be set exactly.
    """
    if p is None:
        p = int(rng.integers(1, 5))
    if radius is None:
        radius = float(rng.uniform(0.5, 0.85))
    coeffs = rng.normal(scale=0.3, size=(p, 2, 2))
    rho = np.max(np.abs(np.linalg.eigvals(companion_matrix(coeffs))))
    if rho < 1e-6:
        coeffs[0, 0, 0] += 0.5
        rho = np.max(np.abs(np.linalg.eigvals(companion_matrix(coeffs))))
    scale = radius / rho
    for k in range(p):
        coeffs[k] *= scale ** (k + 1)
    sigma = np.diag(rng.uniform(0.5, 2.0, size=2))
    return BivariateVarModel(coeffs, sigma)


@pytest.fixture
def random_model_factory():
    return make_random_stable_model
