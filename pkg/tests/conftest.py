import numpy as np
import pytest

from sparsefb.linalg import solve_are
from sparsefb.model import Plant


def random_plant(rng, n, m, d=None, stable_shift=None):
    """Random plant with ``Q = I``-like SPD weights.

    With ``stable_shift`` the open-loop ``A`` is shifted to be Hurwitz.
    """
    d = d or m
    A = rng.standard_normal((n, n))
    if stable_shift is not None:
        A = A - (np.max(np.linalg.eigvals(A).real) + stable_shift) * np.eye(n)
    B1 = rng.standard_normal((n, d))
    B2 = rng.standard_normal((n, m))
    Mq = rng.standard_normal((n, n))
    Mr = rng.standard_normal((m, m))
    Q = np.eye(n) + 0.1 * Mq @ Mq.T
    R = np.eye(m) + 0.1 * Mr @ Mr.T
    return Plant(A, B1, B2, Q, R)


def stabilizing_gain(rng, plant, scale=0.05):
    """A gain near the Riccati gain that keeps the loop stable."""
    _, Fc = solve_are(plant)
    while True:
        F = Fc + scale * rng.standard_normal(Fc.shape)
        if np.max(np.linalg.eigvals(plant.A - plant.B2 @ F).real) < 0:
            return F
        scale *= 0.5


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def scalar_plant():
    return Plant([[1.0]], [[1.0]], [[1.0]], [[1.0]], [[1.0]])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
