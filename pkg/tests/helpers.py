"""Shared oracles and system factories for the test suite."""

from pathlib import Path

import numpy as np

from mormatch.lti import StateSpace, eval_tf, is_minimal

FIXTURES = Path(__file__).parent / 'fixtures'
GOLDEN = Path(__file__).parent / 'golden'


def random_stable_system(rng, n, slowest=1.0):
    """Random minimal system with every eigenvalue real part <= -slowest."""
    while True:
        M = rng.standard_normal((n, n))
        A = M - (np.max(np.linalg.eigvals(M).real) + slowest) * np.eye(n)
        sys = StateSpace(A, rng.standard_normal((n, 1)), rng.standard_normal((1, n)))
        if is_minimal(sys):
            return sys


def corpus(count=20, nmax=8, seed=2024):
    rng = np.random.default_rng(seed)
    return [random_stable_system(rng, int(rng.integers(2, nmax + 1))) for _ in range(count)]


def circle_taylor(f, center, kmax, radius=1e-2, samples=32):
    """Taylor coefficients of `f` at `center` from samples on a small circle.

    ``a_k = (1/N) sum_j f(center + rho w^j) w^{-jk} / rho^k`` with ``w`` an
    ``N``-th root of unity (trapezoidal rule for Cauchy's integral).
    """
    theta = 2 * np.pi * np.arange(samples) / samples
    vals = np.array([f(center + radius * np.exp(1j * t)) for t in theta])
    coef = np.fft.fft(vals) / samples
    return coef[:kmax + 1] / radius ** np.arange(kmax + 1)


def circle_moments(sys, center, kmax, **kw):
    """Moments from the circle oracle, ``eta_k = (-1)^k a_k``."""
    a = circle_taylor(lambda s: eval_tf(sys, s), center, kmax, **kw)
    return a * (-1.0) ** np.arange(kmax + 1)


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))
