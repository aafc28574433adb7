"""Shared fixtures: the three reference instances and instance generators.

FLIP2  2x2 exchange matrix, n=1.
JAC5   free Jacobi matrix (zero diagonal, unit off-diagonal), n=1, N=5.
FIX7   the 7x7 matrix with n=3, pivots 4->1, 5->4, 6->2, 7->6 and
       unpivoted rows {3,5,7}; interior values chosen generically so no
       accidental cancellations occur.  Variants zero the entries (2,5)
       and/or (3,5), which toggles the height pattern of the q system.
"""

import numpy as np
import pytest

from specband import BoundaryMatrix, GenProfile, MatrixSpec, generate_random


@pytest.fixture
def flip2():
    return MatrixSpec(
        n=1,
        n_max=2,
        entries={(1, 2): 1.0},
        pivot={2: 1},
        tail=(1, 2),
    )


@pytest.fixture
def jac5():
    entries = {(i, i + 1): 1.0 for i in range(1, 5)}
    return MatrixSpec(
        n=1,
        n_max=5,
        entries=entries,
        pivot={c: c - 1 for c in range(2, 6)},
        tail=(1, 2),
    )


def make_fix7(m25=1.0, m35=2.0):
    entries = {
        (1, 1): 1.0, (1, 2): -1.0, (1, 3): 2.0, (1, 4): 3.0,
        (2, 2): 2.0, (2, 3): 1.0, (2, 4): -2.0, (2, 5): m25, (2, 6): 2.0,
        (3, 3): -1.0, (3, 4): 1.0, (3, 5): m35, (3, 6): -1.0,
        (4, 4): 1.0, (4, 5): 2.0,
        (5, 5): 3.0, (5, 6): 1.0,
        (6, 6): -2.0, (6, 7): 1.0,
        (7, 7): 2.0,
    }
    entries = {k: v for k, v in entries.items() if v != 0.0}
    return MatrixSpec(
        n=3,
        n_max=7,
        entries=entries,
        pivot={4: 1, 5: 4, 6: 2, 7: 6},
        tail=(7, 8),
    )


@pytest.fixture
def fix7():
    return make_fix7()


def random_boundary(n, seed, complex_offdiag=True):
    """Upper-triangular boundary matrix with diagonal in [0.5, 2]."""
    rng = np.random.default_rng(seed)
    if complex_offdiag:
        t = np.triu(rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n)), 1)
    else:
        t = np.triu(rng.uniform(-1, 1, (n, n)), 1)
    t = t + np.diag(rng.uniform(0.5, 2.0, n)).astype(complex)
    return BoundaryMatrix(n, t)


def random_instance(seed, n=None, N=None, mtilde=False, N_hi=20):
    """Seeded random matrix spec plus a truncation size."""
    rng = np.random.default_rng(seed)
    if n is None:
        n = [1, 2, 3][seed % 3]
    if N is None:
        N = int(rng.integers(n + 2, N_hi + 1))
    spec = generate_random(GenProfile(n=n, n_max=max(N, n + 2), mtilde=mtilde), seed)
    return spec, N
