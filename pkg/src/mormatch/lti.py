"""Dense SISO state-space systems, transfer functions and moments."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from mormatch.errors import BadDegree, ConvergenceFailure, DimensionMismatch, SingularResolvent

__all__ = [
    'StateSpace', 'MomentTable', 'RationalTF', 'eval_tf', 'moment', 'moment_sequence',
    'taylor_coeffs_at_zero', 'spectrum', 'is_minimal', 'companion_realization',
    'tf_coefficients', 'RANK_TOL', 'RESOLVENT_COND_MAX',
]

RANK_TOL = 1e-9
RESOLVENT_COND_MAX = 1e13
IMAG_TOL = 1e-10


def _as_matrix(M, name):
    M = np.array(M, dtype=float)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise DimensionMismatch(f'{name} must be a matrix, got ndim={M.ndim}')
    M.setflags(write=False)
    return M


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Continuous-time SISO system ``x' = Ax + Bu, y = Cx``.

    Arrays are copied to read-only float matrices on construction. A
    one-dimensional `B` is read as a column and a one-dimensional `C` as
    a row.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = _as_matrix(self.A, 'A')
        B = np.array(self.B, dtype=float)
        C = np.array(self.C, dtype=float)
        if B.ndim <= 1:
            B = B.reshape(-1, 1)
        if C.ndim <= 1:
            C = C.reshape(1, -1)
        B, C = _as_matrix(B, 'B'), _as_matrix(C, 'C')
        n = A.shape[0]
        if A.shape != (n, n) or n == 0:
            raise DimensionMismatch(f'A must be square and non-empty, got {A.shape}')
        if B.shape != (n, 1):
            raise DimensionMismatch(f'B must be {n}x1, got {B.shape}')
        if C.shape != (1, n):
            raise DimensionMismatch(f'C must be 1x{n}, got {C.shape}')
        object.__setattr__(self, 'A', A)
        object.__setattr__(self, 'B', B)
        object.__setattr__(self, 'C', C)

    @property
    def n(self):
        return self.A.shape[0]

    def __repr__(self):
        return f'StateSpace(n={self.n})'


@dataclass(frozen=True)
class MomentTable:
    """Moments ``eta_0(point), ..., eta_k(point)`` at a single point."""

    point: complex
    values: tuple

    @property
    def order(self):
        return len(self.values) - 1


@dataclass(frozen=True, eq=False)
class RationalTF:
    """Strictly proper rational function with monic denominator.

    ``numerator`` holds ``beta_0 ... beta_{r-1}`` and ``denominator`` holds
    ``alpha_0 ... alpha_{r-1}`` of ``s^r + alpha_{r-1} s^{r-1} + ... + alpha_0``,
    both in ascending powers. The leading one is implicit.
    """

    numerator: np.ndarray
    denominator: np.ndarray

    def __post_init__(self):
        num = np.atleast_1d(np.array(self.numerator, dtype=float))
        den = np.atleast_1d(np.array(self.denominator, dtype=float))
        if num.ndim != 1 or den.ndim != 1 or den.size == 0:
            raise BadDegree('coefficients must be non-empty vectors')
        if num.size != den.size:
            raise BadDegree(f'numerator has {num.size} coefficients, expected {den.size}')
        object.__setattr__(self, 'numerator', num)
        object.__setattr__(self, 'denominator', den)

    @property
    def r(self):
        return self.denominator.size

    def __call__(self, s):
        num = np.polyval(self.numerator[::-1], s)
        den = np.polyval(np.r_[1.0, self.denominator[::-1]], s)
        return num / den


def _point(s):
    s = complex(s)
    return s.real if s.imag == 0 else s


def _resolvent_lu(A, s):
    n = A.shape[0]
    M = s * np.eye(n) - A
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > RESOLVENT_COND_MAX:
        eigs = np.linalg.eigvals(A)
        nearest = eigs[np.argmin(np.abs(eigs - s))]
        raise SingularResolvent(
            f'sI - A is singular at s={s} (condition {cond:.3g}); '
            f'nearest eigenvalue of A is {_point(nearest)}')
    return spla.lu_factor(M)


def _scalar(z):
    z = complex(z)
    return z.real if z.imag == 0 else z


def moment_sequence(sys, s_star, kmax):
    """Moments ``eta_0 ... eta_kmax`` at `s_star` as a 1-D array.

    Computed by ``kmax + 1`` successive solves ``(s*I - A) z_{j+1} = z_j``
    starting from ``z_0 = B``, reusing one LU factorization. The array is
    real when `s_star` is real.
    """
    s = _point(s_star)
    if kmax < 0:
        raise ValueError('kmax must be non-negative')
    lu = _resolvent_lu(sys.A, s)
    z = sys.B[:, 0].astype(complex if isinstance(s, complex) else float)
    out = np.empty(kmax + 1, dtype=z.dtype)
    for j in range(kmax + 1):
        z = spla.lu_solve(lu, z)
        out[j] = sys.C[0] @ z
    return out


def eval_tf(sys, s):
    """Evaluate ``W(s) = C (sI - A)^{-1} B``."""
    return _scalar(moment_sequence(sys, s, 0)[0])


def moment(sys, s_star, k):
    """Moment of order `k` at `s_star`, ``C (s*I - A)^{-(k+1)} B``."""
    return _scalar(moment_sequence(sys, s_star, k)[k])


def taylor_coeffs_at_zero(sys, kmax):
    """Taylor coefficients ``c_0 ... c_kmax`` of ``W`` around the origin.

    ``c_j = (-1)^j eta_j(0)``.
    """
    eta = moment_sequence(sys, 0.0, kmax)
    signs = (-1.0) ** np.arange(kmax + 1)
    return signs * eta


def spectrum(M):
    """Eigenvalues of `M` with multiplicity."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f'matrix must be square, got {M.shape}')
    try:
        ev = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return list(ev)


def _numerical_rank(M, tol):
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def controllability_matrix(A, B):
    n = A.shape[0]
    cols = [B[:, 0]]
    for _ in range(n - 1):
        cols.append(A @ cols[-1])
    return np.column_stack(cols)


def observability_matrix(A, C):
    return controllability_matrix(A.T, C.T).T


def is_minimal(sys, tol=RANK_TOL):
    """Kalman rank tests for controllability and observability."""
    n = sys.n
    try:
        ctrb = controllability_matrix(sys.A, sys.B)
        obsv = observability_matrix(sys.A, sys.C)
    except (ValueError, np.linalg.LinAlgError):
        return False
    if not (np.all(np.isfinite(ctrb)) and np.all(np.isfinite(obsv))):
        return False
    return _numerical_rank(ctrb, tol) == n and _numerical_rank(obsv, tol) == n


def companion_realization(tf):
    """Controllable companion form of `tf`.

    ``F`` has ones on the superdiagonal and ``-alpha_0 ... -alpha_{r-1}`` in
    the last row, ``G = e_r`` and ``H = [beta_0 ... beta_{r-1}]``.
    """
    r = tf.r
    F = np.zeros((r, r))
    F[:-1, 1:] = np.eye(r - 1)
    F[-1, :] = -tf.denominator
    G = np.zeros((r, 1))
    G[-1, 0] = 1.0
    return StateSpace(F, G, tf.numerator.reshape(1, r))


def tf_coefficients(sys):
    """Recover the monic rational form of ``W`` from a realization.

    The denominator is the characteristic polynomial of ``A``; the numerator
    is the polynomial part of ``D(s) W(s)`` expanded through the Markov
    parameters ``C A^k B``.
    """
    n = sys.n
    d = np.poly(sys.A).real[::-1]  # ascending, d[n] == 1
    markov = np.empty(n)
    v = sys.B[:, 0]
    for k in range(n):
        markov[k] = sys.C[0] @ v
        v = sys.A @ v
    beta = np.array([sum(d[i] * markov[i - j - 1] for i in range(j + 1, n + 1))
                     for j in range(n)])
    return RationalTF(beta, d[:n])
