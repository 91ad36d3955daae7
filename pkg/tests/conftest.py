import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("walksim", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("walksim")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hermitian(n, rng, scale=1.0):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (G + G.conj().T) / 2


def log_uniform_hermitian(n, rng, low=-2.5):
    """Hermitian matrix with entry magnitudes spread log-uniformly over 10^low..1, norm 1."""
    mag = 10.0 ** rng.uniform(low, 0.0, (n, n))
    ph = np.exp(2j * np.pi * rng.uniform(size=(n, n)))
    A = np.triu(mag * ph, 1)
    H = A + A.conj().T + np.diag(mag.diagonal())
    return H / np.linalg.norm(H, 2)


def two_scale_hermitian(n, rng, big=0.8, small=0.05):
    """A few large entries (a Hermitized permutation) over a dense small background, norm 1."""
    P = np.zeros((n, n), dtype=complex)
    P[rng.permutation(n), np.arange(n)] = big
    G = random_hermitian(n, rng, small / np.sqrt(n))
    H = (P + P.conj().T) / 2 + G
    return H / np.linalg.norm(H, 2)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
