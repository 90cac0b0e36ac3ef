import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


def gauss_with_norm(rng, n, bound):
    """Random n x n matrix scaled to spectral norm exactly `bound`."""
    A = rng.standard_normal((n, n))
    if n == 1:
        return A * (bound / abs(float(A[0, 0])))
    return A * (bound / np.linalg.norm(A, 2))
