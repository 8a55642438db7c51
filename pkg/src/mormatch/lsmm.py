"""Least-squares moment matching.

The family ``F = P (S - Delta L) Q, G = P Delta, H = C Pi Q`` with its
admissibility conditions, the index ``J``, and the two equivalent
two-step constructions: projecting a surrogate model of order ``nu``, or
reducing the signal generator first.
"""

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla

from mormatch.errors import NotAdmissible
from mormatch.generators import place_delta, spectra_distance
from mormatch.lti import moment_sequence
from mormatch.models import ReducedModel
from mormatch.sylvester import solve_sylvester, solve_sylvester_dense

__all__ = ['LsmmParameters', 'SurrogateGenerator', 'AdmissibilityReport', 'LsmmWarning',
           'ls_index', 'moment_errors', 'opt_residual', 'max_controlled_invariant',
           'check_admissible', 'lsmm_family', 'surrogate_model_pipeline',
           'surrogate_generator_pipeline', 'find_admissible', 'ls_numerator', 'orth', 'null_space']

SUBSPACE_TOL = 1e-9


class LsmmWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class LsmmParameters:
    P: np.ndarray
    Delta: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'P', np.atleast_2d(np.asarray(self.P, dtype=float)))
        object.__setattr__(self, 'Delta', np.asarray(self.Delta, dtype=float).reshape(-1, 1))
        object.__setattr__(self, 'Q', np.atleast_2d(np.asarray(self.Q, dtype=float)))

    @property
    def r(self):
        return self.P.shape[0]


@dataclass(frozen=True, eq=False)
class SurrogateGenerator:
    """Reduced generator ``(PSQ, LQ)`` and its Sylvester solution ``Pi_bar``."""

    S_bar: np.ndarray
    L_bar: np.ndarray
    Pi_bar: np.ndarray


def orth(M, tol=SUBSPACE_TOL):
    """Orthonormal basis of the range of `M` (rank-revealing SVD)."""
    M = np.atleast_2d(M)
    if M.shape[1] == 0:
        return np.zeros((M.shape[0], 0))
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((M.shape[0], 0))
    return U[:, :int(np.sum(s > tol * s[0]))]


def null_space(M, tol=SUBSPACE_TOL, scale=None):
    """Orthonormal basis of the kernel of `M`.

    Singular values below ``tol * scale`` count as zero; `scale` defaults to
    the largest singular value.
    """
    M = np.atleast_2d(M)
    n = M.shape[1]
    if M.shape[0] == 0 or not np.any(M):
        return np.eye(n)
    _, s, Vt = np.linalg.svd(M)
    rank = int(np.sum(s > tol * (s[0] if scale is None else scale)))
    return Vt[rank:].T


# -- indices ------------------------------------------------------------------

def moment_errors(sys, model, data):
    """``eta_j(s_i) - eta_hat_j(s_i)`` in the layout of `data`."""
    sys_m = getattr(model, 'system', model)
    out = []
    for p, k in zip(data.points, data.orders):
        out.append(moment_sequence(sys, p, k) - moment_sequence(sys_m, p, k))
    return np.concatenate(out)


def ls_index(sys, model, data):
    """Index ``J = sum_i sum_{j <= k_i} |eta_j(s_i) - eta_hat_j(s_i)|^2``."""
    return float(np.sum(np.abs(moment_errors(sys, model, data)) ** 2))


def opt_residual(C_Pi, H, P):
    """``||C Pi - H P||^2`` in the Euclidean norm (self-dual on rows)."""
    R = np.atleast_2d(C_Pi) - np.atleast_2d(H) @ np.atleast_2d(P)
    return float(np.sum(np.abs(R) ** 2))


# -- geometry -----------------------------------------------------------------

def max_controlled_invariant(S, Delta, K, tol=SUBSPACE_TOL):
    """Largest ``V`` in ``span(K)`` with ``S V`` inside ``V + span(Delta)``.

    Fixed-point recursion ``V_0 = span(K)``,
    ``V_{j+1} = V_0 cap S^{-1}(V_j + span(Delta))``, stopped when the
    dimension no longer drops.
    """
    S = np.atleast_2d(S)
    nu = S.shape[0]
    Delta = np.asarray(Delta, dtype=float).reshape(nu, -1)
    K = orth(np.asarray(K, dtype=float).reshape(nu, -1), tol)
    scale = max(np.linalg.norm(S, 2), 1.0)
    V = K
    for _ in range(nu + 1):
        if V.shape[1] == 0:
            return V
        W = orth(np.hstack([V, Delta]), tol)
        # a in null((I - W W^T) S K) <=> S K a in span(W)
        proj = S @ K - W @ (W.T @ (S @ K))
        coeffs = null_space(proj, tol, scale=scale)
        V_new = orth(K @ coeffs, tol) if coeffs.size else np.zeros((nu, 0))
        if V_new.shape[1] == V.shape[1]:
            return V_new
        V = V_new
    return V


@dataclass
class AdmissibilityReport:
    """Per-condition outcome of the admissibility test.

    ``margins`` holds the measured quantity for each check and
    ``passed`` the verdict; :attr:`admissible` is their conjunction.
    """

    passed: dict = field(default_factory=dict)
    margins: dict = field(default_factory=dict)

    @property
    def admissible(self):
        return all(self.passed.values())

    def __bool__(self):
        return self.admissible

    def lines(self):
        out = []
        for name in self.passed:
            verdict = 'pass' if self.passed[name] else 'FAIL'
            out.append(f'{name}: {verdict} (margin {self.margins[name]:.6e})')
        return out


def check_admissible(params, gen, C_Pi):
    """Evaluate full rank, conditions (i)-(iii) of the family.

    (i) ``ker P`` inside ``ker C Pi``; (ii) ``ker P`` is
    ``(S, Delta)``-controlled invariant; (iii) ``P Q = I`` and
    ``sigma(S)`` disjoint from ``sigma(P (S - Delta L) Q)``.
    """
    P, Delta, Q = params.P, params.Delta, params.Q
    S, L = gen.S, gen.L
    C_Pi = np.atleast_2d(C_Pi)
    r, nu = P.shape
    rep = AdmissibilityReport()

    sv = np.linalg.svd(P, compute_uv=False)
    rank = int(np.sum(sv > SUBSPACE_TOL * sv[0])) if sv.size and sv[0] > 0 else 0
    rep.margins['full_rank'] = float(sv[-1] / sv[0]) if rank else 0.0
    rep.passed['full_rank'] = rank == r

    Z = null_space(P)
    norm_cpi = np.linalg.norm(C_Pi)
    if norm_cpi == 0 or Z.shape[1] == 0:
        rep.margins['kerP_in_kerCPi'] = 0.0
        rep.passed['kerP_in_kerCPi'] = True
    else:
        m = float(np.linalg.norm(C_Pi @ Z) / norm_cpi)
        rep.margins['kerP_in_kerCPi'] = m
        rep.passed['kerP_in_kerCPi'] = m <= 1e-9

    if Z.shape[1] == 0:
        rep.margins['controlled_invariant'] = 0.0
        rep.passed['controlled_invariant'] = True
    else:
        ZD = np.hstack([Z, Delta])
        resid = (np.eye(nu) - ZD @ np.linalg.pinv(ZD)) @ S @ Z
        m = float(np.linalg.norm(resid) / max(np.linalg.norm(S), 1e-300))
        rep.margins['controlled_invariant'] = m
        rep.passed['controlled_invariant'] = m <= 1e-9

    if Q.shape != (nu, r):
        rep.margins['PQ_identity'] = np.inf
        rep.passed['PQ_identity'] = False
        rep.margins['spectra_disjoint'] = 0.0
        rep.passed['spectra_disjoint'] = False
        return rep
    m = float(np.linalg.norm(P @ Q - np.eye(r)))
    rep.margins['PQ_identity'] = m
    rep.passed['PQ_identity'] = m <= 1e-10 * max(1.0, np.linalg.norm(P) * np.linalg.norm(Q))
    F = P @ (S - Delta @ L) @ Q
    ev_S = gen.eigenvalues()
    ev_F = np.linalg.eigvals(F)
    dist = spectra_distance(ev_S, ev_F)
    scale = 1 + max(np.max(np.abs(ev_S)), np.max(np.abs(ev_F)))
    rep.margins['spectra_disjoint'] = dist
    rep.passed['spectra_disjoint'] = dist >= 1e-8 * scale
    return rep


def _require_admissible(params, gen, C_Pi):
    rep = check_admissible(params, gen, C_Pi)
    if not rep.admissible:
        failed = [k for k, v in rep.passed.items() if not v]
        raise NotAdmissible(f'parameters not admissible: {", ".join(failed)}', rep)
    return rep


def _warn_order(r, nu):
    if nu // 2 <= r < nu:
        warnings.warn(f'r={r} is not below floor(nu/2)={nu // 2}', LsmmWarning, stacklevel=3)


# -- families -----------------------------------------------------------------

def _provenance(method, params, **extra):
    prov = {'method': method, 'r': params.r, 'delta': params.Delta.ravel().tolist()}
    prov.update(extra)
    return prov


def lsmm_family(gen, sol, params, check=True):
    """Family model ``(P (S - Delta L) Q, P Delta, C Pi Q)``.

    With ``check=True`` the parameters must be admissible, otherwise
    :class:`NotAdmissible` is raised carrying the report. ``check=False``
    evaluates the formula only.
    """
    P, Delta, Q = params.P, params.Delta, params.Q
    if check:
        _require_admissible(params, gen, sol.C_Pi)
        _warn_order(params.r, gen.nu)
    F = P @ (gen.S - Delta @ gen.L) @ Q
    return ReducedModel(F, P @ Delta, sol.C_Pi @ Q, provenance=_provenance('lsmm', params))


def surrogate_model_pipeline(gen, sol, params, check=True):
    """Surrogate of order ``nu`` followed by its projection.

    Returns ``(surrogate, final)`` where the surrogate is
    ``(S - Delta L, Delta, C Pi)`` and the final model is
    ``(P F_bar Q, P G_bar, H_bar Q)``.
    """
    if check:
        _require_admissible(params, gen, sol.C_Pi)
    P, Delta, Q = params.P, params.Delta, params.Q
    F_bar = gen.S - Delta @ gen.L
    surrogate = ReducedModel(F_bar, Delta, sol.C_Pi,
                             provenance=_provenance('lsmm-surrogate', params))
    final = ReducedModel(P @ F_bar @ Q, P @ Delta, sol.C_Pi @ Q,
                         provenance=_provenance('lsmm', params, pipeline='surrogate-model'))
    return surrogate, final


def surrogate_generator_pipeline(sys, gen, params, sol=None, check=True):
    """Reduce the generator to ``(P S Q, L Q)``, then interpolate with it.

    Solves ``A Pi_bar + B L_bar = Pi_bar S_bar`` and returns the surrogate
    generator with the model ``(S_bar - P Delta L_bar, P Delta, C Pi_bar)``.
    """
    P, Delta, Q = params.P, params.Delta, params.Q
    if check:
        if sol is None:
            sol = solve_sylvester(sys, gen)
        _require_admissible(params, gen, sol.C_Pi)
    S_bar = P @ gen.S @ Q
    L_bar = gen.L @ Q
    Pi_bar = solve_sylvester_dense(sys.A, sys.B, S_bar, L_bar)
    G = P @ Delta
    model = ReducedModel(S_bar - G @ L_bar, G, sys.C @ Pi_bar,
                         provenance=_provenance('lsmm', params, pipeline='surrogate-generator'))
    return SurrogateGenerator(S_bar, L_bar, Pi_bar), model


# -- parameter search ----------------------------------------------------------

def _eigen_groups(ev, tol=1e-8):
    """Split eigenvalues into real singletons and conjugate pairs."""
    groups = []
    used = np.zeros(len(ev), dtype=bool)
    for i, lam in enumerate(ev):
        if used[i]:
            continue
        used[i] = True
        if abs(lam.imag) <= tol * (1 + abs(lam)):
            groups.append([lam.real])
            continue
        d = np.abs(ev - lam.conjugate())
        d[used] = np.inf
        j = int(np.argmin(d))
        used[j] = True
        groups.append([lam, ev[j]])
    return groups


def _invariant_subspace(X, selected, tol=1e-6):
    """Real invariant subspace of `X` for the eigenvalues in `selected`."""
    sel = np.asarray(selected, dtype=complex)

    def pick(re, im=0.0):
        return bool(np.min(np.abs(sel - complex(re, im))) <= tol * (1 + abs(complex(re, im))))

    _, Z, sdim = spla.schur(X, output='real', sort=pick)
    return Z[:, :sdim]


def find_admissible(gen, sol, r, delta=None, delta_poles=None, rng=None, attempts=20):
    """Best-effort search for admissible ``(P, Delta, Q)`` of order `r`.

    ``ker P`` is taken as an invariant subspace of the closed loop
    ``S + Delta K`` restricted to the largest ``(S, Delta)``-controlled
    invariant subspace inside ``ker C Pi``. ``P`` has orthonormal rows and
    ``Q = P^T``. `Delta` is used when given, placed from `delta_poles`
    when those are given, and drawn at random otherwise. Raises
    :class:`NotAdmissible` when no candidate passes.
    """
    nu = gen.nu
    if not 1 <= r < nu:
        raise NotAdmissible(f'need 1 <= r < nu={nu}, got r={r}')
    rng = np.random.default_rng(rng)
    if delta is not None:
        deltas = [np.asarray(delta, dtype=float).reshape(nu, 1)]
    elif delta_poles is not None:
        deltas = [place_delta(gen, delta_poles)]
    else:
        deltas = (rng.standard_normal((nu, 1)) for _ in range(attempts))
    C_Pi = sol.C_Pi
    last = None
    for Delta in deltas:
        V = max_controlled_invariant(gen.S, Delta, null_space(C_Pi))
        d = V.shape[1]
        if d < nu - r:
            last = f'controlled invariant subspace has dimension {d} < {nu - r}'
            continue
        coef = np.linalg.lstsq(np.hstack([V, Delta]), gen.S @ V, rcond=None)[0]
        X = coef[:d]
        groups = _eigen_groups(np.linalg.eigvals(X))
        # prefer discarding the slowest zero-dynamics modes: try stable-first subsets
        groups.sort(key=lambda g: np.real(g[0]))
        for count in range(1, len(groups) + 1):
            for combo in itertools.combinations(groups, count):
                if sum(len(g) for g in combo) != nu - r:
                    continue
                Zk = _invariant_subspace(X, [lam for g in combo for lam in g])
                if Zk.shape[1] != nu - r:
                    continue
                kerP = orth(V @ Zk)
                P = null_space(kerP.T).T
                params = LsmmParameters(P, Delta, P.T.copy())
                rep = check_admissible(params, gen, C_Pi)
                if rep.admissible:
                    return params
                last = 'candidate failed: ' + ', '.join(k for k, v in rep.passed.items() if not v)
    raise NotAdmissible(f'no admissible parameters found ({last})')


def ls_numerator(gen, sol, model):
    """Output map minimizing ``J`` for the fixed pair ``(F, G)`` of `model`.

    With ``P_m`` solving ``F P_m + G L = P_m S`` the model moments are
    ``H P_m T``; the real least-squares problem
    ``min_H ||(C Pi - H P_m) T||`` is solved from its stacked real and
    imaginary parts.
    """
    Pm = solve_sylvester_dense(model.F, model.G, gen.S, gen.L, eig_S=gen.eigenvalues())
    T = sol.T
    target = (sol.C_Pi @ T).ravel()
    basis = Pm @ T
    M = np.vstack([basis.real.T, basis.imag.T]) if np.iscomplexobj(basis) else basis.T
    rhs = np.concatenate([target.real, target.imag]) if np.iscomplexobj(target) else target
    H = np.linalg.lstsq(M, rhs, rcond=None)[0].reshape(1, -1)
    prov = dict(model.provenance)
    prov['numerator'] = 'least-squares'
    return ReducedModel(model.F, model.G, H, provenance=prov)
