import json

import numpy as np
import pytest

PLUS = np.array([1.0, 1.0]) / np.sqrt(2)
MINUS = np.array([1.0, -1.0]) / np.sqrt(2)

# r = (1/2, 1/2) in sigma's eigenbasis, so S(rho0, sigma0) = -(log2 0.9 + log2 0.1) / 2
SCENARIO_RHO0 = np.diag([0.75, 0.25]).astype(complex)
SCENARIO_SIGMA0 = (0.9 * np.outer(PLUS, PLUS) + 0.1 * np.outer(MINUS, MINUS)).astype(complex)
SCENARIO_S_CROSS = 1.736965594166206


def random_density(rng, D, rank=None):
    rank = D if rank is None else rank
    g = rng.normal(size=(D, rank)) + 1j * rng.normal(size=(D, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, D):
    g = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    return g + g.conj().T


def random_unitary(rng, D):
    q, r = np.linalg.qr(rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_distribution(rng, D, floor=0.0):
    p = rng.dirichlet(np.ones(D))
    p = np.maximum(p, floor)
    return p / p.sum()


def write_matrix(path, m):
    m = np.asarray(m, dtype=complex)
    path.write_text(json.dumps({"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}))
    return str(path)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def scenario_files(tmp_path):
    return (
        write_matrix(tmp_path / "rho0.json", SCENARIO_RHO0),
        write_matrix(tmp_path / "sigma0.json", SCENARIO_SIGMA0),
    )


RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
