import numpy as np
import pytest

from betaedge.ensemble import TridiagonalMatrix


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running statistical checks")


@pytest.fixture
def random_tridiagonal():
    """Factory for random symmetric tridiagonal test matrices."""

    def make(n, rng, scale=1.0):
        diag = rng.standard_normal(n)
        off = np.abs(rng.standard_normal(max(n - 1, 0))) * scale
        return TridiagonalMatrix(diag, off)

    return make


def dense_eigvals_desc(T):
    """Dense symmetric solver oracle (LAPACK dsyevd on the densified matrix)."""
    return np.linalg.eigvalsh(T.dense())[::-1]
