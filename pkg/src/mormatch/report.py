"""Run a reduction from a :class:`~mormatch.fileformats.ReductionSpec` and
build its plain-text verification report.

Reports are deterministic: sections appear in a fixed order and every
number is printed in shortest round-trip form, so a report doubles as a
golden file.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from mormatch.fileformats import format_complex, format_number
from mormatch.generators import InterpolationData, build_generator, place_delta
from mormatch.krylov import build_projectors, project
from mormatch.lsmm import LsmmWarning, check_admissible, find_admissible, lsmm_family, ls_index
from mormatch.lti import moment_sequence
from mormatch.smith_lucas import reduce_smith_lucas
from mormatch.sylvester import astolfi_family, solve_sylvester

__all__ = ['ReductionOutcome', 'run_reduction', 'default_delta_poles', 'TOLERANCES']

# relative moment-match tolerances behind each method's guarantee
TOLERANCES = {'sylvester': 1e-8, 'krylov': 1e-7, 'smith-lucas': 1e-10, 'orthogonality': 1e-10}


@dataclass
class ReductionOutcome:
    model: object
    report: str
    verified: bool


def default_delta_poles(data):
    """Real poles ``-b (1 + j / nu)``, ``j = 0 ... nu - 1``, with ``b = 1 + max |s_i|``."""
    base = 1.0 + max(abs(p) for p in data.points)
    return [-base * (1.0 + j / data.nu) for j in range(data.nu)]


def _moment_rows(sys, model, data):
    rows = []
    for p, k in zip(data.points, data.orders):
        full = moment_sequence(sys, p, k)
        red = moment_sequence(model.system, p, k)
        for j in range(k + 1):
            rows.append((p, j, complex(full[j]), complex(red[j])))
    return rows


def _moment_table(rows):
    lines = ['point,order,full,reduced,abs_error']
    for p, j, f, r in rows:
        lines.append(','.join([format_complex(p), str(j), format_complex(f), format_complex(r),
                               format_number(abs(f - r))]))
    return lines


def _matched(rows, tol):
    scale = max((abs(f) for _, _, f, _ in rows), default=1.0)
    worst = 0.0
    ok = True
    for _, _, f, r in rows:
        err = abs(f - r)
        worst = max(worst, err / max(abs(f), 1e-14 * scale, 1e-300))
        ok &= err <= tol * max(abs(f), 1e-14 * scale)
    return ok, worst


def _matrix_lines(name, M):
    return [f'{name} ='] + ['  ' + ' '.join(format_number(v) for v in row) for row in np.atleast_2d(M)]


def _check_line(name, ok, value, tol):
    return f'{name}: {"pass" if ok else "FAIL"} (value {format_number(value)}, tolerance {format_number(tol)})'


def run_reduction(sys, spec, compat_paper_numerator=False):
    """Reduce `sys` as `spec` asks and verify the method's guarantee."""
    head = ['mormatch reduction report', f'method: {spec.method}', f'full order: {sys.n}']
    body, checks = [], []
    if spec.method == 'smith-lucas':
        rule = 'compat' if compat_paper_numerator else 'exact'
        model, diag = reduce_smith_lucas(sys, spec.r, spec.q, numerator_rule=rule)
        data = InterpolationData([0.0], [spec.r + spec.q - 1])
        head += [f'reduced order: {model.r}', f'q: {spec.q}', f'numerator rule: {rule}']
        body += ['', '[coefficients]',
                 'alpha = ' + ' '.join(format_number(v) for v in diag.alpha),
                 'beta = ' + ' '.join(format_number(v) for v in diag.beta),
                 '', '[least squares]',
                 'residual = ' + ' '.join(format_number(v) for v in diag.ls_residual),
                 f'orthogonality = {format_number(diag.orthogonality)}']
        index = diag.index_estimate
        index_note = 'J = ||X alpha - mu||^2 over orders 0..r+q-1'
        rows = _moment_rows(sys, model, data)
        exact_rows = [row for row in rows if row[1] < spec.r]
        ok, worst = _matched(exact_rows, TOLERANCES['smith-lucas'])
        checks.append(_check_line('exact match orders 0..r-1', ok, worst, TOLERANCES['smith-lucas']))
        scale = max(1.0, np.linalg.norm(diag.problem.X) * np.linalg.norm(diag.problem.mu))
        tol = TOLERANCES['orthogonality'] * scale
        checks.append(_check_line('normal equations', diag.orthogonality <= tol,
                                  diag.orthogonality, tol))
        verified = ok and diag.orthogonality <= tol
        extra = [f'J_moments = {format_number(diag.index_true)}']
    else:
        data = spec.data()
        gen = build_generator(data)
        sol = solve_sylvester(sys, gen)
        extra = []
        if spec.method == 'sylvester':
            poles = spec.delta_poles or default_delta_poles(data)
            delta = place_delta(gen, poles)
            model = astolfi_family(gen, sol, delta)
            head.append(f'reduced order: {model.r}')
            body += ['', '[parameters]', 'delta poles = ' + ' '.join(format_complex(p) for p in poles)]
            body += _matrix_lines('Delta', delta.T)
            tol = TOLERANCES['sylvester']
        elif spec.method == 'krylov':
            pair = build_projectors(sys, data, data.nu)
            model = project(sys, pair)
            head.append(f'reduced order: {model.r}')
            tol = TOLERANCES['krylov']
        else:
            params = find_admissible(gen, sol, spec.r, delta_poles=spec.delta_poles, rng=0)
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter('always', LsmmWarning)
                model = lsmm_family(gen, sol, params)
            head.append(f'reduced order: {model.r}')
            body += ['', '[parameters]']
            body += _matrix_lines('P', params.P) + _matrix_lines('Delta', params.Delta.T)
            body += _matrix_lines('Q', params.Q)
            rep = check_admissible(params, gen, sol.C_Pi)
            body += ['', '[admissibility]'] + rep.lines()
            body += [f'warning: {w.message}' for w in caught]
            tol = None
        rows = _moment_rows(sys, model, data)
        index = ls_index(sys, model, data)
        index_note = 'J = sum of squared moment errors'
        if tol is None:
            verified = rep.admissible
            checks.append(f'admissible: {"pass" if verified else "FAIL"}')
        else:
            verified, worst = _matched(rows, tol)
            checks.append(_check_line('all moments matched', verified, worst, tol))
    lines = head + body + ['', '[moments]'] + _moment_table(rows)
    lines += ['', '[index]', f'J = {format_number(index)}', f'# {index_note}'] + extra
    lines += ['', '[checks]'] + checks + [f'status: {"verified" if verified else "FAILED"}']
    return ReductionOutcome(model=model, report='\n'.join(lines) + '\n', verified=bool(verified))
