"""Acceptance criteria, one check per criterion.

Each check returns ``(ok, detail)``; the pytest wrapper prints a single
``criterion N: PASS|FAIL`` line and asserts. Run this file directly with
``python3 tests/test_acceptance.py`` for the summary alone.
"""

import io
import sys
import tempfile
import warnings
from contextlib import redirect_stdout
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import GOLDEN, FIXTURES, circle_moments, corpus, random_stable_system, rel_err  # noqa: E402
from mormatch.benchmarks import random_stable  # noqa: E402
from mormatch.cli import main  # noqa: E402
from mormatch.generators import (InterpolationData, build_generator,  # noqa: E402
                                 build_skew_generator, spectra_distance)
from mormatch.krylov import build_projectors, project  # noqa: E402
from mormatch.lsmm import (LsmmWarning, check_admissible, find_admissible, lsmm_family,  # noqa: E402
                           surrogate_generator_pipeline, surrogate_model_pipeline)
from mormatch.lti import StateSpace, eval_tf, moment_sequence  # noqa: E402
from mormatch.smith_lucas import (build_problem, embed_in_family,  # noqa: E402
                                  reduce_smith_lucas, solve_denominator)
from mormatch.sylvester import (astolfi_family, moments_via_sylvester,  # noqa: E402
                                solve_sylvester, steady_state_check)

TWO_POLE = StateSpace(np.diag([-1.0, -2.0]), [[1.0], [1.0]], [[1.0, -1.0]])
FIRST = StateSpace([[-1.0]], [[1.0]], [[1.0]])


def moment_row(sys, data):
    return np.concatenate([moment_sequence(sys, p, k) for p, k in zip(data.points, data.orders)])


def criterion_1():
    """Sylvester-route moments agree with resolvent powers and the circle fit."""
    systems = corpus(20, nmax=8, seed=101)
    cases = [([0.0], [4]), ([0.5], [4]), ([2j, -2j], [4, 4]), ([0.0, 0.5, 2j, -2j], [4, 4, 4, 4])]
    worst_syl = worst_circle = 0.0
    for sys in systems:
        for points, orders in cases:
            data = InterpolationData(points, orders)
            gen = build_generator(data)
            tables = moments_via_sylvester(sys, gen, solve_sylvester(sys, gen))
            for t in tables:
                direct = moment_sequence(sys, t.point, t.order)
                worst_syl = max(worst_syl, rel_err(np.array(t.values), direct))
        for p in (0.0, 0.5, 2j):
            worst_circle = max(worst_circle, rel_err(moment_sequence(sys, p, 4), circle_moments(sys, p, 4)))
    ok = worst_syl <= 1e-8 and worst_circle <= 1e-6
    return ok, f'max rel err Sylvester {worst_syl:.2e} (tol 1e-8), circle {worst_circle:.2e} (tol 1e-6)'


def criterion_2():
    """Every random admissible Delta reproduces all nu moments."""
    rng = np.random.default_rng(202)
    datasets = [([0.0], [5]), ([0.0, 0.5], [1, 1]), ([1j, -1j], [1, 1]), ([0.0, 2j, -2j], [1, 0, 0]),
                ([0.5, 1j, -1j, 2j, -2j], [0, 0, 0, 0, 0]), ([0.0, 1.0, 2.0], [1, 1, 1])]
    systems = corpus(5, nmax=8, seed=203)
    worst, count = 0.0, 0
    for points, orders in datasets:
        data = InterpolationData(points, orders)
        gen = build_generator(data)
        tried = 0
        while tried < 20:
            delta = rng.standard_normal((gen.nu, 1))
            F = gen.S - delta @ gen.L
            if spectra_distance(np.linalg.eigvals(F), gen.eigenvalues()) < 0.1:
                continue
            tried += 1
            for sys in systems:
                model = astolfi_family(gen, solve_sylvester(sys, gen), delta)
                worst = max(worst, rel_err(moment_row(model.system, data), moment_row(sys, data)))
                count += 1
    return worst <= 1e-8, f'{count} models, max rel moment err {worst:.2e} (tol 1e-8)'


def criterion_3():
    """Krylov projections match every prescribed moment."""
    sets = [([0.0], [3]), ([0.5, 2.0], [1, 1]), ([2j, -2j], [1, 1]), ([0.0, 1j, -1j], [1, 0, 0]),
            ([0.0, 0.5, 2j, -2j], [0, 0, 0, 0])]
    worst, count = 0.0, 0
    for sys in corpus(20, nmax=8, seed=101):
        for points, orders in sets:
            data = InterpolationData(points, orders)
            if data.nu > sys.n:
                continue
            model = project(sys, build_projectors(sys, data, data.nu))
            worst = max(worst, rel_err(moment_row(model.system, data), moment_row(sys, data)))
            count += 1
    return worst <= 1e-7, f'{count} projections, max rel moment err {worst:.2e} (tol 1e-7)'


def criterion_4():
    """Worked example on 1/((s+1)(s+2)) with r = q = 1."""
    model, diag = reduce_smith_lucas(TWO_POLE, 1, 1)
    normal = diag.problem.X.T @ diag.ls_residual
    checks = {
        'alpha': abs(diag.alpha[0] - 66 / 85),
        'beta': abs(diag.beta[0] - 33 / 85),
        'residual': float(np.max(np.abs(diag.ls_residual - [7 / 85, 6 / 85]))),
        'X^T r': float(np.max(np.abs(normal))),
        'W(0)': abs(eval_tf(model.system, 0.0) - 0.5),
        'J': abs(diag.index_estimate - 1 / 85),
    }
    ok = all(v <= 1e-12 for v in checks.values())
    detail = ', '.join(f'{k} {v:.1e}' for k, v in checks.items())
    return ok, f'abs errors {detail} (tol 1e-12; J = ||X alpha - mu||^2 from c_0..c_2)'


def criterion_5():
    """Full-order reduction of 1/(s+1) is exact."""
    _, diag = reduce_smith_lucas(FIRST, 1, 1)
    ok = (abs(diag.alpha[0] - 1) <= 1e-14 and abs(diag.beta[0] - 1) <= 1e-14
          and diag.index_true <= 1e-14 and diag.index_estimate <= 1e-14)
    return ok, f'alpha {float(diag.alpha[0])!r}, beta {float(diag.beta[0])!r}, J {diag.index_true:.1e} (tol 1e-14)'


def criterion_6():
    """No perturbation of the denominator within radius 1 lowers the LS residual."""
    rng = np.random.default_rng(606)
    violations = 0
    for seed in range(10):
        prob = build_problem(random_stable(5, seed), 2, 2)
        alpha = solve_denominator(prob)
        best = np.linalg.norm(prob.X @ alpha - prob.mu)
        for _ in range(200):
            d = rng.standard_normal(alpha.size)
            d *= rng.uniform(0, 1) / np.linalg.norm(d)
            if np.linalg.norm(prob.X @ (alpha + d) - prob.mu) < best - 1e-15:
                violations += 1
    return violations == 0, f'{violations} improving perturbations in 10 x 200 draws'


def criterion_7():
    """Surrogate-model pipeline equals the family formula; with S Q = Q S_bar both pipelines agree."""
    rng = np.random.default_rng(707)
    worst_fact = worst_pipe = 0.0
    draws = 0
    for sys in corpus(6, nmax=7, seed=708):
        for gen in (build_skew_generator([1.0, 2.0], include_zero=True),
                    build_generator(InterpolationData([0.0, 1j, -1j], [1, 1, 1]))):
            sol = solve_sylvester(sys, gen)
            for r in (1, 2):
                params = find_admissible(gen, sol, r, rng=rng)
                _, final = surrogate_model_pipeline(gen, sol, params)
                P, D, Q = params.P, params.Delta, params.Q
                for got, want in ((final.F, P @ (gen.S - D @ gen.L) @ Q), (final.G, P @ D),
                                  (final.H, sol.C_Pi @ Q)):
                    worst_fact = max(worst_fact, float(np.max(np.abs(got - want))))
                draws += 1
    for n, r, q in ((2, 1, 1), (4, 2, 1), (5, 2, 2), (6, 3, 2)):
        sys = TWO_POLE if n == 2 else random_stable_system(np.random.default_rng(n), n)
        emb = embed_in_family(sys, r, q)
        _, a = surrogate_model_pipeline(emb.gen, emb.sol, emb.params)
        _, b = surrogate_generator_pipeline(sys, emb.gen, emb.params, sol=emb.sol)
        for x, y in ((a.F, b.F), (a.G, b.G), (a.H, b.H)):
            worst_pipe = max(worst_pipe, float(np.max(np.abs(x - y))))
    ok = worst_fact <= 1e-12 and worst_pipe <= 1e-10
    return ok, f'{draws} admissible draws: factorization {worst_fact:.1e} (tol 1e-12), pipelines {worst_pipe:.1e} (tol 1e-10)'


def criterion_8():
    """Steady-state output equals C Pi w; exactly so from the invariant manifold."""
    sys = random_stable_system(np.random.default_rng(808), 6, slowest=1.0)
    gen = build_skew_generator([1.0])
    sol = solve_sylvester(sys, gen)
    rest = steady_state_check(sys, gen, sol, horizon=20.0, dt=1e-3)
    manifold = steady_state_check(sys, gen, sol, horizon=20.0, dt=1e-3, x0='manifold', window=1.0)
    ok = rest <= 1e-4 and manifold <= 1e-7
    return ok, f'from rest {rest:.1e} (tol 1e-4), from manifold {manifold:.1e} (tol 1e-7)'


def criterion_9():
    """The least-squares reduction at zero is a family member."""
    rng = np.random.default_rng(909)
    worst_tf = worst_mom = 0.0
    ok = True
    for n, r, q in ((2, 1, 1), (3, 1, 2), (4, 2, 1), (5, 2, 2), (6, 3, 2)):
        sys = TWO_POLE if n == 2 else random_stable_system(np.random.default_rng(10 * n), n)
        emb = embed_in_family(sys, r, q)
        ok &= check_admissible(emb.params, emb.gen, emb.sol.C_Pi).admissible
        family = lsmm_family(emb.gen, emb.sol, emb.params)
        ref, _ = reduce_smith_lucas(sys, r, q)
        for s in rng.uniform(-0.5, 1, 16) + 1j * rng.uniform(-2, 2, 16):
            a, b = eval_tf(family.system, s), eval_tf(ref.system, s)
            worst_tf = max(worst_tf, abs(a - b) / abs(b))
        worst_mom = max(worst_mom, rel_err(moment_sequence(family.system, 0, r - 1), moment_sequence(sys, 0, r - 1)))
        ev_S = np.linalg.eigvals(emb.gen.S)
        for lam in np.linalg.eigvals(emb.surrogate.S_bar):
            ok &= bool(np.min(np.abs(ev_S - lam)) <= 1e-8)
    ok &= worst_tf <= 1e-8 and worst_mom <= 1e-10
    return ok, f'tf rel err {worst_tf:.1e} (tol 1e-8), moments 0..r-1 {worst_mom:.1e} (tol 1e-10)'


def _cli_run(workdir, method):
    bench = workdir / 'bench.txt'
    buf = io.StringIO()
    with redirect_stdout(buf):
        main(['gen', '--kind', 'random-stable', '--n', '6', '--seed', '1', '--out', str(bench)])
        code = main(['reduce', '--model', str(bench), '--spec', str(FIXTURES / 'specs' / f'{method}.spec'),
                     '--out', str(workdir / f'{method}.out')])
    return code, buf.getvalue(), (workdir / f'{method}.out').read_text()


def criterion_10():
    """gen, then reduce with every method: reports are golden and repeatable."""
    bad = []
    with tempfile.TemporaryDirectory() as tmp:
        for method in ('smith-lucas', 'sylvester', 'krylov', 'lsmm'):
            runs = []
            for k in range(2):
                d = Path(tmp) / f'{method}-{k}'
                d.mkdir()
                runs.append(_cli_run(d, method))
            (c1, r1, m1), (c2, r2, m2) = runs
            if c1 != 0 or c2 != 0 or r1 != r2 or m1 != m2 or r1 != (GOLDEN / f'{method}.txt').read_text():
                bad.append(method)
    return not bad, 'all four reports byte-identical to golden' if not bad else f'mismatch: {", ".join(bad)}'


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10]


def _line(number, ok, detail):
    return f'criterion {number}: {"PASS" if ok else "FAIL"} ({detail})'


@pytest.mark.parametrize('number', range(1, len(CRITERIA) + 1))
def test_criterion(number, capsys):
    ok, detail = CRITERIA[number - 1]()
    with capsys.disabled():
        print('\n' + _line(number, ok, detail))
    assert ok, detail


if __name__ == '__main__':
    warnings.simplefilter('ignore', LsmmWarning)
    results = []
    for i, check in enumerate(CRITERIA, start=1):
        ok, detail = check()
        results.append(ok)
        print(_line(i, ok, detail))
    sys.exit(0 if all(results) else 1)
