"""Krylov subspaces and Petrov-Galerkin projection."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from mormatch.errors import DimensionMismatch, RankDeficient, SingularShift
from mormatch.generators import check_disjoint
from mormatch.lti import RESOLVENT_COND_MAX
from mormatch.models import ReducedModel

__all__ = ['ProjectorPair', 'KrylovBasis', 'krylov_subspace', 'gram_schmidt', 'build_projectors',
           'project']

BREAKDOWN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ProjectorPair:
    """Biorthogonal pair with ``P Q = I_r``."""

    P: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        r, m = P.shape
        if Q.shape != (m, r):
            raise DimensionMismatch(f'P is {P.shape} but Q is {Q.shape}')
        err = np.linalg.norm(P @ Q - np.eye(r))
        if err > 1e-10 * max(1.0, np.linalg.norm(P) * np.linalg.norm(Q)):
            raise DimensionMismatch(f'P Q differs from the identity by {err:.3g}')
        object.__setattr__(self, 'P', P)
        object.__setattr__(self, 'Q', Q)

    @property
    def r(self):
        return self.P.shape[0]

    @property
    def m(self):
        return self.P.shape[1]


@dataclass(frozen=True, eq=False)
class KrylovBasis:
    """Orthonormal basis ``V`` of a Krylov subspace.

    ``requested`` is the width asked for (doubled for a complex shift) and
    ``breakdown`` is set when fewer independent directions were found.
    """

    V: np.ndarray
    requested: int

    @property
    def width(self):
        return self.V.shape[1]

    @property
    def breakdown(self):
        return self.width < self.requested


def gram_schmidt(vectors, basis=None, tol=BREAKDOWN_TOL):
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Appends the vectors in `vectors` (columns) to the orthonormal `basis`,
    skipping any whose component orthogonal to the current span is below
    `tol` times its original norm.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    m = vectors.shape[0]
    cols = [] if basis is None else [basis[:, i] for i in range(basis.shape[1])]
    for i in range(vectors.shape[1]):
        v = vectors[:, i].copy()
        norm0 = np.linalg.norm(v)
        if norm0 == 0:
            continue
        for _ in range(2):
            for q in cols:
                v -= (q @ v) * q
        norm = np.linalg.norm(v)
        if norm <= tol * norm0:
            continue
        cols.append(v / norm)
    if not cols:
        return np.zeros((m, 0))
    return np.column_stack(cols)


def _is_infinite(s):
    if s is None:
        return True
    if isinstance(s, str):
        return s.strip().lower() in ('inf', 'infinity', '+inf')
    return np.isinf(abs(complex(s)))


def _raw_krylov_vectors(M, v, s_star, j):
    m = M.shape[0]
    v = np.asarray(v).reshape(-1)
    if _is_infinite(s_star):
        apply = lambda z: M @ z
        z = v.astype(float)
        out = [z]
        for _ in range(j - 1):
            nz = np.linalg.norm(z)
            if nz == 0:
                break
            z = apply(z / nz)
            out.append(z)
        return out
    s = complex(s_star)
    shifted = s * np.eye(m) - M if s.imag != 0 else s.real * np.eye(m) - M
    cond = np.linalg.cond(shifted)
    if not np.isfinite(cond) or cond > RESOLVENT_COND_MAX:
        raise SingularShift(f'shift {s} is (numerically) an eigenvalue of M')
    lu = spla.lu_factor(shifted)
    z = v.astype(shifted.dtype)
    out = []
    for _ in range(j):
        z = spla.lu_solve(lu, z)
        out.append(z)
        nz = np.linalg.norm(z)
        if nz == 0:
            break
        z = z / nz
    return out


def krylov_subspace(M, v, s_star, j, strict=False):
    """Orthonormal real basis of the Krylov subspace ``K_j(M, v; s*)``.

    For ``s* = inf`` (``None``, ``np.inf`` or ``'inf'``) the subspace is
    ``span{v, Mv, ..., M^{j-1} v}``; for finite ``s*`` it is
    ``span{(s*I - M)^{-1} v, ..., (s*I - M)^{-j} v}``. A complex shift is
    paired with its conjugate and the real span of real and imaginary parts
    is returned, of width up to ``2j``.

    Breakdown is reported through :attr:`KrylovBasis.breakdown`; with
    ``strict=True`` it raises :class:`RankDeficient` instead.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if j < 1 or j > M.shape[0]:
        raise ValueError(f'need 1 <= j <= {M.shape[0]}, got j={j}')
    raw = _raw_krylov_vectors(M, v, s_star, j)
    is_complex = not _is_infinite(s_star) and complex(s_star).imag != 0
    if is_complex:
        cols = [part for z in raw for part in (z.real, z.imag)]
        requested = 2 * j
    else:
        cols = [np.real(z) for z in raw]
        requested = j
    V = gram_schmidt(np.column_stack(cols))
    basis = KrylovBasis(V, requested)
    if strict and basis.breakdown:
        raise RankDeficient(f'Krylov breakdown at width {basis.width} of {requested}')
    return basis


def build_projectors(sys, data, r):
    """One-sided interpolatory projectors for `data`.

    ``P^T`` spans the union of ``K_{k_i + 1}(A, B; s_i)``, so the projected
    model matches ``eta_0 ... eta_{k_i}`` at every ``s_i``. ``P`` has
    orthonormal rows and ``Q = P^T (P P^T)^{-1}``.
    """
    if r != data.nu:
        raise DimensionMismatch(f'subspace widths sum to {data.nu}, but r={r}')
    check_disjoint(np.linalg.eigvals(sys.A), data.eigenvalues(), 'sigma(A) and interpolation points')
    V = np.zeros((sys.n, 0))
    for p, k in zip(data.points, data.orders):
        if p.imag < 0:
            continue
        K = krylov_subspace(sys.A, sys.B, p, k + 1)
        V = gram_schmidt(K.V, basis=V)
    if V.shape[1] < r:
        raise RankDeficient(f'union of Krylov subspaces has width {V.shape[1]} < r={r}')
    P = V.T
    Q = P.T @ np.linalg.inv(P @ P.T)
    return ProjectorPair(P, Q)


def project(sys, pair):
    """Petrov-Galerkin model ``F = P A Q, G = P B, H = C Q``."""
    if pair.m != sys.n:
        raise DimensionMismatch(f'projectors act on dimension {pair.m}, system has n={sys.n}')
    P, Q = pair.P, pair.Q
    return ReducedModel(P @ sys.A @ Q, P @ sys.B, sys.C @ Q,
                        provenance={'method': 'krylov', 'r': pair.r}, projectors=pair)
