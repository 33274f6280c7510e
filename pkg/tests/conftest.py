import numpy as np
import pytest

from prodfn.analysis import ReplicationParams, generate_replication_dataset
from prodfn.forms import DesignMatrix
from prodfn.series import Dataset


def make_design(y, X, names=None, start_year=2000):
    X = np.asarray(X, dtype=float)
    if names is None:
        names = ("const",) + tuple(f"x{j}" for j in range(1, X.shape[1]))
    return DesignMatrix("y", np.asarray(y, dtype=float), tuple(names), X, start_year)


def random_design(rng, n, k, beta=None, noise=1.0):
    X = np.column_stack([np.ones(n), rng.standard_normal((n, k - 1))])
    if beta is None:
        beta = rng.standard_normal(k)
    y = X @ beta + noise * rng.standard_normal(n)
    return make_design(y, X)


def ar1_design(rng, n=60, rho=0.6, beta=(1.0, 0.5, -0.3), sd=0.5):
    """Regression with AR(1) errors and trending regressors."""
    k = len(beta)
    X = np.column_stack([np.ones(n)] + [np.cumsum(rng.standard_normal(n)) for _ in range(k - 1)])
    e = rng.standard_normal(n) * sd
    u = np.empty(n)
    u[0] = e[0] / np.sqrt(1 - rho**2)
    for t in range(1, n):
        u[t] = rho * u[t - 1] + e[t]
    return make_design(X @ np.asarray(beta) + u, X)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def replication():
    return generate_replication_dataset(ReplicationParams(), seed=0)


@pytest.fixture(scope="session")
def noiseless():
    return generate_replication_dataset(ReplicationParams().with_(innovation_sd=0.0), seed=0)


@pytest.fixture
def small_dataset():
    rng = np.random.default_rng(5)
    n = 25
    K = 100 * np.exp(np.cumsum(0.03 + 0.02 * rng.standard_normal(n)))
    L = 50 * np.exp(np.cumsum(0.02 + 0.02 * rng.standard_normal(n)))
    Q = 3 * K**0.4 * L**0.5 * np.exp(0.01 * np.arange(n) + 0.02 * rng.standard_normal(n))
    return Dataset(1980, {"Q": Q, "L": L, "K": K})


# -- acceptance summary ------------------------------------------------------------

ACCEPTANCE_LINES = {}


@pytest.fixture
def verdict():
    """Record a PASS/FAIL line for the end-of-run acceptance summary."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
