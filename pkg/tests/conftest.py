import numpy as np
import pytest


def haar_unitary(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_contraction(rng, n, n_unit=None):
    """W diag(s) V* with ``n_unit`` singular values exactly 1 and the rest in [0, 0.99]."""
    if n_unit is None:
        n_unit = int(rng.integers(0, n + 1)) if rng.random() < 0.3 else 0
    s = rng.uniform(0.0, 0.99, size=n)
    s[:n_unit] = 1.0
    return (haar_unitary(rng, n) * s) @ haar_unitary(rng, n).conj().T


def random_disc(rng, size=None, radius=0.95):
    r = radius * np.sqrt(rng.random(size))
    return r * np.exp(2j * np.pi * rng.random(size))


def doubly_commuting_tuple(rng, k, n):
    """Random doubly commuting contractions, k operators of size n.

    Either a simultaneously diagonalizable normal family (some eigenvalues
    unimodular), or a non-normal block ``A`` in slot 0 paired with scalar
    multiples of the identity on that block in the other slots.
    """
    q = haar_unitary(rng, n)
    if n >= 2 and rng.random() < 0.5:
        b = int(rng.integers(2, n + 1))
        ops = []
        for i in range(k):
            blk = random_contraction(rng, b, 0) if i == 0 else random_disc(rng) * np.eye(b)
            rest = np.diag(random_disc(rng, n - b))
            full = np.zeros((n, n), dtype=complex)
            full[:b, :b] = blk
            full[b:, b:] = rest
            ops.append(q @ full @ q.conj().T)
        return ops
    ops = []
    for _ in range(k):
        lam = random_disc(rng, n)
        if rng.random() < 0.3:
            lam[0] = np.exp(2j * np.pi * rng.random())
        ops.append((q * lam) @ q.conj().T)
    return ops


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def report_line():
    """Record one acceptance summary line; printed after the run."""
    return ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
