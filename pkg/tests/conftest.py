import numpy as np
import pytest

from srrlasso.ingest import bundled_example_path, read_dense_csv
from srrlasso.linalg import Problem


@pytest.fixture(scope="session")
def example_arrays():
    return read_dense_csv(bundled_example_path())


@pytest.fixture(scope="session")
def example_problem(example_arrays):
    X, y = example_arrays
    return Problem(X, y, 0.0)


def random_problem(rng, n, p, lam_ratio=0.0):
    X = rng.standard_normal((n, p))
    y = rng.standard_normal(n)
    lam = lam_ratio * float(np.max(np.abs(X.T @ y)))
    return Problem(X, y, lam)


# acceptance summary -------------------------------------------------------------

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda s: int(s.split(".")[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}")


def rebuild_search_points(result):
    """s^0, s^1, ... rebuilt from a traced SRR run's iterates and factors."""
    iterates = result.trace.iterates
    alphas = [row.alpha for row in result.trace.rows[1:]]
    s = [np.zeros_like(iterates[0])]
    prev = np.zeros_like(iterates[0])
    for beta, a in zip(iterates, alphas):
        h = s[-1] if result.trace.variant == "srrc" else prev
        s.append((1 - a) * h + a * beta)
        prev = beta
    return s
