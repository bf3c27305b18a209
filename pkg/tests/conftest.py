"""Shared corpora and fixture paths.

Corpus seeds are frozen so the property tests exercise the same systems on
every run.  Builder functions are plain callables so the acceptance suite
can time corpus construction; the session fixtures wrap them.
"""

import pathlib
import time

import numpy as np
import pytest

import modalenergy as me

SESSION_START = time.perf_counter()

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def random_spd(rng, n):
    Q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    P = Q @ np.diag(rng.uniform(0.5, 2.0, n)) @ Q.T
    return 0.5 * (P + P.T)


def build_diag_corpus(count=200, max_n=50, seed=271828):
    """Random diagonalizable systems with SPD weights and probe states."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(2, max_n + 1))
        A = rng.standard_normal((n, n))
        try:
            basis = me.decompose(A)
        except me.DefectiveMatrix:
            continue
        if np.linalg.cond(basis.V) > 1e6:
            continue  # keep the 1e-9 identity checks meaningful
        P = random_spd(rng, n)
        x = rng.standard_normal(n)
        out.append((me.StateSpaceModel(A=A, P=P), basis, x))
    return out


def build_normal_corpus(count=50, seed=314159):
    """Alternating symmetric / skew-symmetric matrices with probe states."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(2, 21))
        B = rng.standard_normal((n, n))
        A = 0.5 * (B + B.T) if k % 2 == 0 else 0.5 * (B - B.T)
        x = rng.standard_normal(n)
        out.append((A, x))
    return out


def build_nonnormal_corpus(count=50, seed=161803):
    """Random systems rejected down to normality index < 0.95."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(2, 16))
        A = rng.standard_normal((n, n))
        if me.normality_index(A) >= 0.95:
            continue
        try:
            basis = me.decompose(A)
        except me.DefectiveMatrix:
            continue
        x = rng.standard_normal(n)
        out.append((A, basis, x))
    return out


@pytest.fixture(scope="session")
def diag_corpus():
    return build_diag_corpus()


@pytest.fixture(scope="session")
def normal_corpus():
    return build_normal_corpus()


@pytest.fixture(scope="session")
def nonnormal_corpus():
    return build_nonnormal_corpus()


@pytest.fixture
def fixtures_dir():
    return FIXTURES
