"""Deterministic benchmark systems.

``random-stable`` draws its entries from a 64-bit linear congruential
generator so the same seed gives the same file on every platform::

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64
    u      = (state >> 11) / 2**53          # uniform on [0, 1)
    x      = 2 u - 1                        # uniform on [-1, 1)

The initial state is the seed. Entries are drawn for ``M`` row by row,
then ``B``, then ``C``, and ``A = M - (max Re sigma(M) + 1) I``.
"""

import numpy as np

from mormatch.lti import StateSpace

__all__ = ['Lcg64', 'rc_ladder', 'random_stable', 'generate', 'KINDS', 'two_pole']

KINDS = ('rc-ladder', 'random-stable')

_MASK = (1 << 64) - 1


class Lcg64:
    """64-bit LCG with Knuth's MMIX multiplier and increment."""

    A = 6364136223846793005
    C = 1442695040888963407

    def __init__(self, seed=0):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (self.A * self.state + self.C) & _MASK
        return self.state

    def uniform(self):
        return (self.next_u64() >> 11) / float(1 << 53)

    def symmetric(self, size):
        return np.array([2.0 * self.uniform() - 1.0 for _ in range(size)])


def rc_ladder(n):
    """RC ladder: ``A`` tridiagonal with -2 on the diagonal, 1 beside it."""
    if n < 1:
        raise ValueError(f'need n >= 1, got {n}')
    A = -2.0 * np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1)
    B = np.zeros((n, 1))
    B[0, 0] = 1.0
    return StateSpace(A, B, B.T)


def random_stable(n, seed=0):
    if n < 1:
        raise ValueError(f'need n >= 1, got {n}')
    g = Lcg64(seed)
    M = g.symmetric(n * n).reshape(n, n)
    B = g.symmetric(n).reshape(n, 1)
    C = g.symmetric(n).reshape(1, n)
    shift = np.max(np.linalg.eigvals(M).real) + 1.0
    return StateSpace(M - shift * np.eye(n), B, C)


def generate(kind, n, seed=0):
    if kind == 'rc-ladder':
        return rc_ladder(n)
    if kind == 'random-stable':
        return random_stable(n, seed)
    raise ValueError(f'unknown benchmark kind {kind!r}; choose from {", ".join(KINDS)}')


def two_pole():
    """``W(s) = 1 / ((s + 1)(s + 2))`` in diagonal form."""
    return StateSpace(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, -1.0]])
