"""Signal generators ``(S, L)`` encoding interpolation points and orders."""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import linear_sum_assignment

from mormatch.errors import (DuplicateFrequency, InvalidInterpolationData, NotConjugateClosed,
                             ObservabilityFailure, PlacementFailure, SpectraOverlap)
from mormatch.lti import RANK_TOL, observability_matrix

__all__ = ['InterpolationData', 'SignalGenerator', 'build_generator', 'build_skew_generator',
           'place_delta', 'spectra_distance', 'check_disjoint', 'OBSV_COND_MAX']

POINT_TOL = 1e-12
OBSV_COND_MAX = 1e12


def _close(a, b):
    return abs(a - b) <= POINT_TOL * (1 + max(abs(a), abs(b)))


@dataclass(frozen=True)
class InterpolationData:
    """Distinct interpolation points with their orders.

    A point with order ``k`` contributes the moments ``eta_0 ... eta_k``,
    so ``nu = sum(k_i + 1)``.
    """

    points: tuple
    orders: tuple

    def __post_init__(self):
        points = tuple(complex(p) for p in self.points)
        orders = tuple(int(k) for k in self.orders)
        if len(points) != len(orders):
            raise InvalidInterpolationData(
                f'{len(points)} points but {len(orders)} orders')
        if not points:
            raise InvalidInterpolationData('at least one interpolation point is required')
        if any(k < 0 for k in orders):
            raise InvalidInterpolationData('orders must be non-negative')
        for i in range(len(points)):
            for j in range(i):
                if _close(points[i], points[j]):
                    raise InvalidInterpolationData(
                        f'interpolation points must be distinct, {points[i]} repeated')
        for p, k in zip(points, orders):
            if p.imag == 0:
                continue
            match = [kk for q, kk in zip(points, orders) if _close(q, p.conjugate())]
            if not match or match[0] != k:
                raise NotConjugateClosed(
                    f'point {p} (order {k}) has no conjugate partner of the same order')
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'orders', orders)

    @property
    def nu(self):
        return sum(k + 1 for k in self.orders)

    @property
    def N(self):
        return len(self.points)

    def layout(self):
        """``(point, j)`` pairs in the order the moment row is laid out."""
        return [(p, j) for p, k in zip(self.points, self.orders) for j in range(k + 1)]

    def eigenvalues(self):
        """Points repeated ``k_i + 1`` times."""
        return np.array([p for p, k in zip(self.points, self.orders) for _ in range(k + 1)])


@dataclass(frozen=True, eq=False)
class SignalGenerator:
    """Autonomous system ``w' = S w, theta = L w``.

    ``data`` records the interpolation data the generator was built from,
    when known. The Jordan-chain basis used to read moments off ``C Pi`` is
    computed against it.
    """

    S: np.ndarray
    L: np.ndarray
    data: InterpolationData = field(default=None)

    def __post_init__(self):
        S = np.atleast_2d(np.array(self.S, dtype=float))
        L = np.array(self.L, dtype=float).reshape(1, -1)
        if S.shape[0] != S.shape[1] or L.shape[1] != S.shape[0]:
            raise ValueError(f'inconsistent generator shapes S{S.shape}, L{L.shape}')
        if self.data is not None and self.data.nu != S.shape[0]:
            raise ValueError(f'data has nu={self.data.nu} but S is {S.shape[0]}x{S.shape[0]}')
        S.setflags(write=False)
        L.setflags(write=False)
        object.__setattr__(self, 'S', S)
        object.__setattr__(self, 'L', L)

    @property
    def nu(self):
        return self.S.shape[0]

    def eigenvalues(self):
        """Spectrum of ``S``, exact from ``data`` when available."""
        if self.data is not None:
            return self.data.eigenvalues()
        return np.linalg.eigvals(self.S)


def spectra_distance(a, b):
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if a.size == 0 or b.size == 0:
        return np.inf
    return float(np.min(np.abs(a[:, None] - b[None, :])))


def check_disjoint(a, b, what='spectra'):
    """Raise :class:`SpectraOverlap` unless the spectra `a` and `b` are apart.

    The separation required is ``1e-8 * (1 + max |lambda|)``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    scale = 1 + max(np.max(np.abs(a), initial=0), np.max(np.abs(b), initial=0))
    dist = spectra_distance(a, b)
    if dist < 1e-8 * scale:
        raise SpectraOverlap(f'{what} overlap (minimum distance {dist:.3g})')
    return dist


def _real_char_poly(data):
    """Ascending real coefficients of ``prod (s - s_i)^(k_i + 1)``."""
    coeffs = np.array([1.0])
    for p, k in zip(data.points, data.orders):
        if p.imag == 0:
            factor = np.array([-p.real, 1.0])
        elif p.imag > 0:
            factor = np.array([abs(p) ** 2, -2 * p.real, 1.0])
        else:
            continue
        for _ in range(k + 1):
            coeffs = npoly.polymul(coeffs, factor)
    return coeffs


def _pbh_observable(S, L, eigenvalues, tol=RANK_TOL):
    nu = S.shape[0]
    for lam in np.unique(np.round(eigenvalues, 12)):
        M = np.vstack([S - lam * np.eye(nu), L])
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] <= tol * s[0]:
            return False
    return True


def build_generator(data):
    """Real companion generator for `data`.

    ``S`` is the companion matrix of ``prod (s - s_i)^(k_i + 1)`` with ones
    on the subdiagonal and the negated coefficients in the last column;
    ``L = [0, ..., 0, 1]``. Companion matrices are non-derogatory, and the
    pair is observable by construction: the observability matrix is unit
    anti-triangular, which is checked exactly. A singular-value test would
    misjudge the badly scaled companion forms of clustered points.
    """
    coeffs = _real_char_poly(data)
    nu = data.nu
    S = np.zeros((nu, nu))
    S[1:, :-1] = np.eye(nu - 1)
    S[:, -1] = -coeffs[:nu]
    L = np.zeros((1, nu))
    L[0, -1] = 1.0
    flipped = np.fliplr(observability_matrix(S, L))
    if np.triu(flipped, 1).any() or not np.all(np.diag(flipped) == 1.0):
        raise ObservabilityFailure('companion generator is not observable')
    return SignalGenerator(S, L, data)


def build_skew_generator(frequencies, include_zero=False):
    """Skew-symmetric generator with 2x2 rotation blocks.

    Each frequency ``w`` contributes ``[[0, w], [-w, 0]]``; an optional
    trailing 1x1 zero block adds the point zero. ``L`` is a row of ones.
    """
    freqs = [float(w) for w in frequencies]
    if any(w <= 0 for w in freqs):
        raise ValueError('frequencies must be positive')
    for i in range(len(freqs)):
        for j in range(i):
            if _close(freqs[i], freqs[j]):
                raise DuplicateFrequency(f'frequency {freqs[i]} repeated')
    nu = 2 * len(freqs) + int(bool(include_zero))
    if nu == 0:
        raise ValueError('empty generator')
    S = np.zeros((nu, nu))
    points = []
    for j, w in enumerate(freqs):
        S[2 * j, 2 * j + 1] = w
        S[2 * j + 1, 2 * j] = -w
        points += [1j * w, -1j * w]
    if include_zero:
        points.append(0.0)
    L = np.ones((1, nu))
    data = InterpolationData(points, [0] * len(points))
    if not _pbh_observable(S, L, data.eigenvalues()):
        raise ObservabilityFailure('skew generator is not observable')
    return SignalGenerator(S, L, data)


def _match_cost(a, b):
    D = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    rows, cols = linear_sum_assignment(D)
    return float(D[rows, cols].max())


def place_delta(gen, desired_poles):
    """Output injection ``Delta`` with ``sigma(S - Delta L) = desired_poles``.

    Ackermann's formula on the dual pair ``(S^T, L^T)``:
    ``Delta = p(S) O^{-1} e_nu`` with ``O`` the observability matrix of
    ``(S, L)`` and ``p`` the desired characteristic polynomial.
    """
    poles = np.asarray(desired_poles, dtype=complex).ravel()
    nu = gen.nu
    if poles.size != nu:
        raise PlacementFailure(f'{poles.size} poles requested for nu={nu}')
    for p in poles:
        if p.imag != 0 and spectra_distance([p.conjugate()], poles) > POINT_TOL * (1 + abs(p)):
            raise NotConjugateClosed(f'desired pole {p} has no conjugate partner')
    check_disjoint(poles, gen.eigenvalues(), 'desired poles and sigma(S)')
    O = observability_matrix(gen.S, gen.L)
    cond = np.linalg.cond(O)
    if not np.isfinite(cond) or cond > OBSV_COND_MAX:
        raise PlacementFailure(f'(S, L) observability margin too small (cond {cond:.3g})')
    p = np.poly(poles).real
    pS = np.zeros((nu, nu))
    for c in p:
        pS = pS @ gen.S + c * np.eye(nu)
    e = np.zeros((nu, 1))
    e[-1, 0] = 1.0
    delta = pS @ np.linalg.solve(O, e)
    achieved = np.linalg.eigvals(gen.S - delta @ gen.L)
    err = _match_cost(achieved, poles)
    if err > 1e-6 * (1 + np.max(np.abs(poles))):
        raise PlacementFailure(f'placed poles miss the targets by {err:.3g}')
    return delta
