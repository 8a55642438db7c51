"""Smith-Lucas least-squares reduction at zero.

The denominator comes from a least-squares fit of the Taylor data at the
origin and the numerator from exact matching of the first ``r`` Taylor
coefficients. :func:`embed_in_family` rebuilds the same model inside the
least-squares family with a nilpotent generator.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from mormatch.errors import (EmbeddingFailure, PoleAtOrigin, RankDeficientX, SingularResolvent,
                             ZeroAtOrigin)
from mormatch.generators import InterpolationData, build_generator
from mormatch.lsmm import LsmmParameters, check_admissible, ls_index, surrogate_generator_pipeline
from mormatch.lti import RationalTF, companion_realization, moment_sequence, taylor_coeffs_at_zero
from mormatch.models import ReducedModel
from mormatch.sylvester import solve_sylvester

__all__ = ['SmithLucasProblem', 'SmithLucasDiagnostics', 'SmithLucasEmbedding', 'build_problem',
           'solve_denominator', 'solve_numerator', 'reduce_smith_lucas', 'embed_in_family']


@dataclass(frozen=True, eq=False)
class SmithLucasProblem:
    """Least-squares data assembled from Taylor coefficients ``c_j`` at zero.

    ``X[i, j] = -c[r + i - j]`` is ``(r + q) x r``, ``mu = c[:r + q]`` and
    ``Y`` is lower-triangular Toeplitz with ``-c_0`` on the diagonal.
    """

    mu: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    r: int
    q: int
    coeffs: np.ndarray


def build_problem(sys, r, q):
    if r < 1 or q < 0:
        raise ValueError(f'need r >= 1 and q >= 0, got r={r}, q={q}')
    try:
        c = taylor_coeffs_at_zero(sys, 2 * r + q - 1)
    except SingularResolvent as exc:
        raise PoleAtOrigin(f'0 is an eigenvalue of A: {exc}') from exc
    if abs(c[0]) <= 1e-14 * max(1.0, np.max(np.abs(c))):
        raise ZeroAtOrigin('W(0) = 0; the numerator rule needs a nonzero DC gain')
    X = -np.array([[c[r + i - j] for j in range(r)] for i in range(r + q)])
    Y = -np.array([[c[i - j] if i >= j else 0.0 for j in range(r)] for i in range(r)])
    return SmithLucasProblem(mu=c[:r + q].copy(), X=X, Y=Y, r=r, q=q, coeffs=c)


def solve_denominator(prob):
    """``alpha = argmin ||X alpha - mu||`` through a QR factorization of ``X``."""
    Qx, R = spla.qr(prob.X, mode='economic')
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag.min() <= 1e-12 * max(diag.max(), 1e-300):
        raise RankDeficientX('moment matrix X is rank deficient')
    return spla.solve_triangular(R, Qx.T @ prob.mu)


def solve_numerator(prob, alpha_hat, rule='exact'):
    """Numerator coefficients for the denominator `alpha_hat`.

    ``rule='exact'`` uses ``beta = -Y alpha``, i.e.
    ``beta_j = sum_{i <= j} c_i alpha_{j-i}``, which reproduces
    ``c_0 ... c_{r-1}`` exactly. ``rule='compat'`` applies the printed
    ``beta = -Y^{-1} alpha`` and does not, in general.
    """
    alpha_hat = np.asarray(alpha_hat, dtype=float).ravel()
    if alpha_hat.size != prob.r:
        raise ValueError(f'alpha has length {alpha_hat.size}, expected r={prob.r}')
    if rule == 'exact':
        return -prob.Y @ alpha_hat
    if rule == 'compat':
        return -np.linalg.solve(prob.Y, alpha_hat)
    raise ValueError(f"rule must be 'exact' or 'compat', got {rule!r}")


@dataclass(frozen=True, eq=False)
class SmithLucasDiagnostics:
    problem: SmithLucasProblem
    alpha: np.ndarray
    beta: np.ndarray
    ls_residual: np.ndarray
    orthogonality: float
    index_estimate: float
    exact_match_errors: np.ndarray
    index_true: float

    @property
    def exact_match_max(self):
        return float(np.max(np.abs(self.exact_match_errors)))


def reduce_smith_lucas(sys, r, q, numerator_rule='exact'):
    """Reduced model of order `r` and its diagnostics.

    ``index_estimate`` is ``||X alpha - mu||^2``, the index the denominator
    fit minimizes, where ``X alpha`` estimates the model's first ``r + q``
    Taylor coefficients. ``index_true`` is ``J`` over the actual moment
    errors of orders ``0 ... r + q - 1``. ``exact_match_errors`` lists the
    moment errors of orders ``0 ... r - 1``.
    """
    prob = build_problem(sys, r, q)
    alpha = solve_denominator(prob)
    beta = solve_numerator(prob, alpha, rule=numerator_rule)
    realized = companion_realization(RationalTF(beta, alpha))
    model = ReducedModel.from_system(realized, provenance={
        'method': 'smith-lucas', 'r': r, 'q': q, 'numerator_rule': numerator_rule})
    resid = prob.X @ alpha - prob.mu
    ortho = float(np.linalg.norm(prob.X.T @ resid))
    exact_err = moment_sequence(sys, 0.0, r - 1) - moment_sequence(realized, 0.0, r - 1)
    data = InterpolationData([0.0], [r + q - 1])
    diag = SmithLucasDiagnostics(
        problem=prob, alpha=alpha, beta=beta, ls_residual=resid, orthogonality=ortho,
        index_estimate=float(resid @ resid), exact_match_errors=exact_err,
        index_true=ls_index(sys, model, data))
    return model, diag


@dataclass(frozen=True, eq=False)
class SmithLucasEmbedding:
    """Family parameters reproducing a Smith-Lucas model.

    ``gen`` is the nilpotent generator of size ``r + q``, ``sol`` its
    Sylvester solution for the system, ``params`` the admissible
    ``(P, Delta, Q)`` and ``surrogate`` the reduced generator with
    ``S Q = Q S_bar``.
    """

    gen: object
    sol: object
    params: LsmmParameters
    surrogate: object
    alpha: np.ndarray


def _lower_shift(m):
    S = np.zeros((m, m))
    S[1:, :-1] = np.eye(m - 1)
    return S


def embed_in_family(sys, r, q, alpha=None):
    """Admissible ``(P, Delta, Q)`` whose family model is the Smith-Lucas one.

    ``S`` is the lower shift of size ``nu = r + q`` with ``L = e_nu^T``, and
    ``Q`` selects the last ``r`` coordinates, the ``S``-invariant subspace
    with ``S Q = Q S_bar`` for the ``r x r`` lower shift ``S_bar``. Then
    ``S_bar - Delta_bar L_bar`` is the companion matrix of
    ``s^r + alpha_{r-1} s^{r-1} + ... + alpha_0`` for ``Delta_bar = alpha``.
    ``P = [M, I_r]`` and ``Delta = Q alpha``, with ``M`` solving the linear
    conditions that ``ker P`` lies in ``ker C Pi`` and is
    ``(S, Delta)``-controlled invariant.
    """
    if q < 1:
        raise EmbeddingFailure('the embedding needs q >= 1 (nu > r)')
    if alpha is None:
        alpha = solve_denominator(build_problem(sys, r, q))
    alpha = np.asarray(alpha, dtype=float).ravel()
    nu = r + q
    gen = build_generator(InterpolationData([0.0], [nu - 1]))
    sol = solve_sylvester(sys, gen)
    C_Pi = sol.C_Pi
    Q = np.eye(nu)[:, q:]
    delta_bar = alpha.reshape(r, 1)

    # unknowns: vec(M) (r*q, column-major) and g (q)
    S_q, S_r = _lower_shift(q), _lower_shift(r)
    E = np.zeros((r, q))
    E[0, q - 1] = 1.0
    H = C_Pi @ Q
    invariance = np.hstack([np.kron(S_q.T, np.eye(r)) - np.kron(np.eye(q), S_r),
                            -np.kron(np.eye(q), delta_bar)])
    kernel = np.hstack([np.kron(np.eye(q), H), np.zeros((q, q))])
    K = np.vstack([invariance, kernel])
    rhs = np.concatenate([-E.reshape(-1, order='F'), C_Pi[0, :q]])
    x, _, rank, _ = np.linalg.lstsq(K, rhs, rcond=None)
    resid = np.linalg.norm(K @ x - rhs)
    if rank < K.shape[1] or resid > 1e-10 * max(1.0, np.linalg.norm(rhs)):
        raise EmbeddingFailure(
            f'no P = [M, I] satisfies the kernel conditions (rank {rank}/{K.shape[1]}, '
            f'residual {resid:.3g})')
    M = x[:r * q].reshape((r, q), order='F')
    P = np.hstack([M, np.eye(r)])
    params = LsmmParameters(P, Q @ delta_bar, Q)
    rep = check_admissible(params, gen, C_Pi)
    if not rep.admissible:
        failed = ', '.join(k for k, v in rep.passed.items() if not v)
        raise EmbeddingFailure(f'embedded parameters fail admissibility: {failed}')
    surrogate, _ = surrogate_generator_pipeline(sys, gen, params, sol=sol, check=False)
    return SmithLucasEmbedding(gen=gen, sol=sol, params=params, surrogate=surrogate, alpha=alpha)
