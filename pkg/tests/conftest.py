import numpy as np
import pytest

from rmusic import ArrayGeometry, steering_matrix

# Filled by tests/test_acceptance.py, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def gen():
    return np.random.default_rng(12345)


def crandn(g, *shape):
    return g.standard_normal(shape) + 1j * g.standard_normal(shape)


def random_psd(g, n, rank=None):
    G = crandn(g, n, rank or n)
    return G @ G.conj().T


def noise_free_covariance(doas, M, powers=None):
    """``A diag(p) A^H`` for a half-wavelength ULA."""
    A = steering_matrix(ArrayGeometry(M), doas)
    p = np.ones(len(doas)) if powers is None else np.asarray(powers)
    return (A * p) @ A.conj().T
