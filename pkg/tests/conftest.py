import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("PGRAND_HYPOTHESIS_PROFILE", "default"))

_I = np.eye(2, dtype=complex)
_PAULI_MATS = {
    0: _I,
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[1, 0], [0, -1]], dtype=complex),
    3: np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def pauli_matrix(p):
    """Dense matrix of a phase-free Pauli string, qubit 0 as the leftmost tensor factor."""
    m = np.ones((1, 1), dtype=complex)
    for c in p.codes():
        m = np.kron(m, _PAULI_MATS[c])
    return m


def embed(u, targets, n):
    """Full ``2^n`` matrix of a local unitary acting on ``targets`` (first target leftmost)."""
    k = len(targets)
    dim = 2**n
    full = np.zeros((dim, dim), dtype=complex)
    rest = [q for q in range(n) if q not in targets]
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        local_in = 0
        for q in targets:
            local_in = (local_in << 1) | bits[q]
        for local_out in range(2**k):
            amp = u[local_out, local_in]
            if amp == 0:
                continue
            out_bits = list(bits)
            for i, q in enumerate(targets):
                out_bits[q] = (local_out >> (k - 1 - i)) & 1
            row = 0
            for b in out_bits:
                row = (row << 1) | b
            full[row, col] += amp
    del rest
    return full


def equal_up_to_phase(a, b, tol=1e-9):
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < tol:
        return np.allclose(a, 0, atol=tol)
    phase = a[idx] / b[idx]
    return abs(abs(phase) - 1) < tol and np.allclose(a, phase * b, atol=tol)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
