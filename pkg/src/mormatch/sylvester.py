"""Moments through the Sylvester equation ``A Pi + B L = Pi S``.

Also holds the interpolating family ``(S - Delta L, Delta, C Pi)`` and a
time-domain check that ``C Pi w(t)`` is the steady-state output of the
system driven by the generator.
"""

from dataclasses import dataclass

import numpy as np

from mormatch.errors import IllConditioned, StepTooLarge, UnstableA
from mormatch.generators import check_disjoint
from mormatch.lti import MomentTable
from mormatch.models import ReducedModel

__all__ = ['SylvesterSolution', 'solve_sylvester', 'solve_sylvester_dense', 'sylvester_residual',
           'jordan_basis', 'moments_via_sylvester', 'astolfi_family', 'steady_state_check',
           'KRON_COND_MAX']

KRON_COND_MAX = 1e12


@dataclass(frozen=True, eq=False)
class SylvesterSolution:
    """Solution ``Pi`` of ``A Pi + B L = Pi S`` together with ``C Pi``.

    ``T`` is the basis change with ``C Pi T`` equal to the moment row; it is
    ``None`` when the generator carries no interpolation data. ``T`` is
    complex whenever some interpolation point is.
    """

    Pi: np.ndarray
    C_Pi: np.ndarray
    T: np.ndarray = None
    residual: float = 0.0


def sylvester_residual(A, B, S, L, Pi):
    """Relative residual of ``A Pi + B L - Pi S`` in the Frobenius norm."""
    R = A @ Pi + B @ L - Pi @ S
    nrm = np.linalg.norm
    scale = nrm(A) * nrm(Pi) + nrm(Pi) * nrm(S) + nrm(B) * nrm(L)
    return float(nrm(R) / scale) if scale > 0 else float(nrm(R))


def solve_sylvester_dense(A, B, S, L, eig_A=None, eig_S=None):
    """Solve ``A X + B L = X S`` by Kronecker vectorization.

    The unknown is stacked column-wise and
    ``(I kron A - S^T kron I) vec(X) = -vec(B L)`` is solved densely.
    """
    A = np.atleast_2d(A)
    S = np.atleast_2d(S)
    n, nu = A.shape[0], S.shape[0]
    check_disjoint(np.linalg.eigvals(A) if eig_A is None else eig_A,
                   np.linalg.eigvals(S) if eig_S is None else eig_S,
                   'sigma(A) and sigma(S)')
    K = np.kron(np.eye(nu), A) - np.kron(S.T, np.eye(n))
    cond = np.linalg.cond(K)
    if not np.isfinite(cond) or cond > KRON_COND_MAX:
        raise IllConditioned(f'vectorized Sylvester operator has condition {cond:.3g}')
    rhs = -(B @ L).reshape(-1, order='F')
    return np.linalg.solve(K, rhs).reshape((n, nu), order='F')


def jordan_basis(gen):
    """Columns ``t_{i,0} ... t_{i,k_i}`` of Jordan chains of ``S``.

    For each point ``s_i`` the chain satisfies ``(S - s_i I) t_0 = 0``,
    ``(S - s_i I) t_j = -t_{j-1}`` with ``L t_0 = 1`` and ``L t_j = 0``.
    These normalizations make ``C Pi t_{i,j} = eta_j(s_i)``.
    """
    data = gen.data
    if data is None:
        raise ValueError('generator has no interpolation data')
    nu = gen.nu
    complex_points = any(p.imag != 0 for p in data.points)
    dtype = complex if complex_points else float
    cols = []
    for p, k in zip(data.points, data.orders):
        lam = p if complex_points else p.real
        aug = np.vstack([gen.S - lam * np.eye(nu), gen.L]).astype(dtype)
        rhs = np.zeros(nu + 1, dtype=dtype)
        rhs[-1] = 1.0
        t = np.linalg.lstsq(aug, rhs, rcond=None)[0]
        cols.append(t)
        for _ in range(k):
            t = np.linalg.lstsq(aug, np.concatenate([-t, [0.0]]), rcond=None)[0]
            cols.append(t)
    return np.column_stack(cols)


def solve_sylvester(sys, gen):
    """Solve ``A Pi + B L = Pi S`` for the system `sys` and generator `gen`.

    Works for any realization with ``(A, B, C)`` attributes through `sys`
    (a :class:`~mormatch.lti.StateSpace`; pass ``model.system`` for a
    reduced model).
    """
    Pi = solve_sylvester_dense(sys.A, sys.B, gen.S, gen.L, eig_S=gen.eigenvalues())
    T = jordan_basis(gen) if gen.data is not None else None
    res = sylvester_residual(sys.A, sys.B, gen.S, gen.L, Pi)
    return SylvesterSolution(Pi=Pi, C_Pi=sys.C @ Pi, T=T, residual=res)


def _clean(z):
    z = complex(z)
    return z.real if abs(z.imag) <= 1e-10 else z


def moments_via_sylvester(sys, gen, sol):
    """Moment tables read off the row ``C Pi T``.

    One :class:`~mormatch.lti.MomentTable` per interpolation point, in the
    order of ``gen.data``.
    """
    if sol.T is None:
        sol = solve_sylvester(sys, gen)
    row = (sol.C_Pi @ sol.T).ravel()
    tables = []
    pos = 0
    for p, k in zip(gen.data.points, gen.data.orders):
        vals = row[pos:pos + k + 1]
        if p.imag == 0:
            vals = [_clean(v) for v in vals]
        else:
            vals = [complex(v) for v in vals]
        tables.append(MomentTable(point=p.real if p.imag == 0 else p, values=tuple(vals)))
        pos += k + 1
    return tables


def astolfi_family(gen, sol, delta):
    """Model ``F = S - Delta L, G = Delta, H = C Pi`` of order ``nu``.

    It matches all ``nu`` moments encoded by `gen` provided
    ``sigma(S - Delta L)`` avoids ``sigma(S)``.
    """
    delta = np.asarray(delta, dtype=float).reshape(-1, 1)
    F = gen.S - delta @ gen.L
    check_disjoint(np.linalg.eigvals(F), gen.eigenvalues(), 'sigma(S - Delta L) and sigma(S)')
    return ReducedModel(F, delta, sol.C_Pi,
                        provenance={'method': 'sylvester', 'delta': delta.ravel().tolist()})


def _rk4_step_matrix(J, dt):
    # one classical RK4 step of z' = J z is z -> p(dt J) z with p the degree-4 Taylor polynomial
    hJ = dt * J
    I = np.eye(J.shape[0])
    return I + hJ @ (I + hJ @ (I / 2 + hJ @ (I / 6 + hJ / 24)))


def steady_state_check(sys, gen, sol, horizon, dt, x0='zero', window=0.2, seed=0):
    """Largest normalized gap between ``y(t)`` and ``C Pi w(t)``.

    Integrates ``w' = S w, x' = A x + B L w`` with fixed-step RK4 from a
    random ``w(0)`` drawn with `seed`. ``x0='zero'`` starts from rest and
    ``x0='manifold'`` starts on ``x(0) = Pi w(0)``. The result is the max of
    ``|y - C Pi w| / max(1, max |C Pi w|)`` over the last `window` fraction
    of the horizon.
    """
    A, B, C = sys.A, sys.B, sys.C
    eig_A = np.linalg.eigvals(A)
    if np.max(eig_A.real) >= 0:
        raise UnstableA(f'A has an eigenvalue with real part {np.max(eig_A.real):.3g} >= 0')
    n, nu = A.shape[0], gen.nu
    J = np.block([[gen.S, np.zeros((nu, n))], [B @ gen.L, A]])
    rho = np.max(np.abs(np.linalg.eigvals(J)))
    if dt * rho > 0.1:
        raise StepTooLarge(f'dt * spectral radius = {dt * rho:.3g} > 0.1')
    steps = int(round(horizon / dt))
    rng = np.random.default_rng(seed)
    w0 = rng.standard_normal(nu)
    if x0 == 'zero':
        xs = np.zeros(n)
    elif x0 == 'manifold':
        xs = sol.Pi @ w0
    else:
        raise ValueError(f"x0 must be 'zero' or 'manifold', got {x0!r}")
    M = _rk4_step_matrix(J, dt)
    z = np.concatenate([w0, xs])
    Z = np.empty((steps + 1, nu + n))
    Z[0] = z
    for k in range(steps):
        z = M @ z
        Z[k + 1] = z
    first = int(np.floor((1 - window) * steps))
    y = Z[first:, nu:] @ C[0]
    y_ss = Z[first:, :nu] @ sol.C_Pi[0]
    return float(np.max(np.abs(y - y_ss)) / max(1.0, np.max(np.abs(y_ss))))
