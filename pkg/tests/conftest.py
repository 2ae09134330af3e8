import numpy as np
import pytest
from scipy.optimize import minimize
from scipy.stats import unitary_group

from curvedwalk.conditions import z_diag
from curvedwalk.linalg import eig_subspace


def random_unitary_with_fixed_space(dim, fixed_dim, rng):
    """``V diag(1,..,1, e^{i phi},..) V^dagger`` with ``fixed_dim`` unit eigenvalues."""
    V = unitary_group.rvs(dim, random_state=rng)
    ph = np.ones(dim, dtype=complex)
    ph[fixed_dim:] = np.exp(1j * rng.uniform(0.3, 2 * np.pi - 0.3, dim - fixed_dim))
    return (V * ph) @ V.conj().T


def search_realizable_speeds(C, rng, starts=20, tol=1e-9):
    """Independent oracle: speeds ``c`` that some fixed vector ``alpha'`` realises.

    Within the fixed space of ``C`` minimise ``||P (Z - c) alpha'||`` from
    random starts, then keep a hit if the first-order equation
    ``(C^dagger - I) delta = 2 (Z - c) alpha'`` has a least-squares solution
    with residual below ``tol``.
    """
    basis = eig_subspace(C, 1.0)
    if not basis:
        return []
    V = np.column_stack(basis)
    dim = C.shape[0]
    z = z_diag(dim)
    M = C.conj().T - np.eye(dim)
    P = V @ V.conj().T
    p = V.shape[1]

    def unpack(w):
        y = V @ (w[:p] + 1j * w[p:])
        return y / np.linalg.norm(y)

    def cost(w):
        y = unpack(w)
        c = np.sum(z * np.abs(y) ** 2)
        return float(np.linalg.norm(P @ (z * y - c * y)) ** 2)

    found = []
    for _ in range(starts):
        res = minimize(cost, rng.standard_normal(2 * p), method="BFGS", options={"gtol": 1e-12})
        y = unpack(res.x)
        c = float(np.sum(z * np.abs(y) ** 2))
        rhs = 2 * (z * y - c * y)
        sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        if np.linalg.norm(M @ sol - rhs) <= tol:
            found.append(c)
    return found


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one summary line per acceptance criterion
ACCEPTANCE_RESULTS: dict[int, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::test_criterion_" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        n = int(name.split("_")[2])
        ACCEPTANCE_RESULTS[n] = f"criterion {n}: {'PASS' if report.passed else 'FAIL'} ({name}, {report.duration:.1f} s)"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(ACCEPTANCE_RESULTS[n])
