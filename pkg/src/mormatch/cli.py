"""Command-line entry point: ``mormatch moments|reduce|freqresp|gen``.

Library errors exit with their class's ``exit_code`` (see
:mod:`mormatch.errors`); a reduction whose guarantee fails to verify
exits with :class:`~mormatch.errors.VerificationFailed`'s code after
writing its outputs.
"""

import argparse
import csv
import io
import math
import sys as _sys

import numpy as np

from mormatch import __version__
from mormatch.benchmarks import KINDS, generate
from mormatch.errors import MorError, SingularResolvent, SpecError, VerificationFailed
from mormatch.fileformats import (format_complex, format_number, parse_complex, read_model,
                                  read_spec, render_model)
from mormatch.lti import eval_tf, moment_sequence
from mormatch.report import run_reduction

__all__ = ['main', 'build_parser', 'freqresp_rows', 'moments_rows']


def _write(path, text):
    if path is None or path == '-':
        _sys.stdout.write(text)
    else:
        with open(path, 'w', newline='') as f:
            f.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _point_arg(text):
    try:
        return parse_complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def moments_rows(sys, point, kmax):
    """``(order, eta_k, taylor_k)`` with ``W(s) = sum_k taylor_k (s - s*)^k``."""
    eta = moment_sequence(sys, point, kmax)
    return [(k, complex(eta[k]), complex((-1) ** k * eta[k])) for k in range(kmax + 1)]


def cmd_moments(args):
    _, model = read_model(args.model)
    rows = moments_rows(model, args.point, args.kmax)
    lines = [f'# moments at s* = {format_complex(args.point)}', 'order  eta  taylor']
    lines += [f'{k}  {format_complex(e)}  {format_complex(t)}' for k, e, t in rows]
    _sys.stdout.write('\n'.join(lines) + '\n')
    if args.out:
        _write(args.out, _csv(['order', 're', 'im'],
                              [[k, format_number(e.real), format_number(e.imag)] for k, e, _ in rows]))
    return 0


def cmd_reduce(args):
    _, model = read_model(args.model)
    spec = read_spec(args.spec)
    if args.compat_paper_numerator and spec.method != 'smith-lucas':
        raise SpecError('--compat-paper-numerator only applies to method=smith-lucas')
    outcome = run_reduction(model, spec, compat_paper_numerator=args.compat_paper_numerator)
    comment = f'reduced model, method={spec.method}, r={outcome.model.r}'
    _write(args.out, render_model(outcome.model.system, 'reduced', comment))
    if args.out not in (None, '-'):
        _sys.stdout.write(outcome.report)
    if args.report:
        _write(args.report, outcome.report)
    if not outcome.verified:
        raise VerificationFailed('method guarantee not verified; see the [checks] section')
    return 0


def freqresp_rows(sys, wmin, wmax, count, compare=None):
    """Rows ``[omega, re, im, magnitude, phase(, abs_error)]`` on a log grid.

    Points where ``i omega I - A`` is singular give NaN entries; their
    frequencies are returned as the second element.
    """
    if count < 2:
        raise ValueError('count must be at least 2')
    if not 0 < wmin <= wmax:
        raise ValueError('need 0 < wmin <= wmax')
    rows, singular = [], []
    for w in np.logspace(math.log10(wmin), math.log10(wmax), count):
        try:
            z = complex(eval_tf(sys, 1j * w))
            row = [w, z.real, z.imag, abs(z), math.atan2(z.imag, z.real)]
            if compare is not None:
                row.append(abs(z - complex(eval_tf(compare, 1j * w))))
        except SingularResolvent:
            row = [w] + [math.nan] * (5 if compare is not None else 4)
            singular.append(w)
        rows.append(row)
    return rows, singular


def cmd_freqresp(args):
    _, model = read_model(args.model)
    other = read_model(args.compare)[1] if args.compare else None
    try:
        rows, singular = freqresp_rows(model, args.wmin, args.wmax, args.count, other)
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    header = ['omega', 're', 'im', 'magnitude', 'phase'] + (['abs_error'] if other else [])
    text = _csv(header, [[format_number(v) if not math.isnan(v) else 'nan' for v in r] for r in rows])
    if singular:
        text += '# singular at omega = ' + ' '.join(format_number(w) for w in singular) + '\n'
    _write(args.out, text)
    return 0


def cmd_gen(args):
    if args.n < 1:
        raise SpecError(f'need n >= 1, got {args.n}')
    model = generate(args.kind, args.n, args.seed)
    comment = f'{args.kind} benchmark, n={args.n}' + (f', seed={args.seed}' if args.kind == 'random-stable' else '')
    _write(args.out, render_model(model, 'full', comment))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog='mormatch', description='Moment-matching model reduction.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('moments', help='moments and Taylor coefficients at a point')
    p.add_argument('--model', required=True)
    p.add_argument('--point', required=True, type=_point_arg, help='a, bi or a+bi')
    p.add_argument('--kmax', required=True, type=int)
    p.add_argument('--out', help='CSV file with columns order, re, im')
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser('reduce', help='reduce a model as a spec file prescribes')
    p.add_argument('--model', required=True)
    p.add_argument('--spec', required=True)
    p.add_argument('--out', required=True, help="reduced model file ('-' for stdout)")
    p.add_argument('--report', help='also write the report to this file')
    p.add_argument('--compat-paper-numerator', action='store_true',
                   help='smith-lucas: use beta = -Y^{-1} alpha instead of beta = -Y alpha')
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser('freqresp', help='frequency response on a log grid, as CSV')
    p.add_argument('--model', required=True)
    p.add_argument('--wmin', required=True, type=float)
    p.add_argument('--wmax', required=True, type=float)
    p.add_argument('--count', required=True, type=int)
    p.add_argument('--compare', help='second model file; adds an abs_error column')
    p.add_argument('--out')
    p.set_defaults(func=cmd_freqresp)

    p = sub.add_parser('gen', help='write a benchmark model file')
    p.add_argument('--kind', required=True, choices=KINDS)
    p.add_argument('--n', required=True, type=int)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--out')
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MorError as exc:
        print(f'mormatch: {type(exc).__name__}: {exc}', file=_sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f'mormatch: {exc}', file=_sys.stderr)
        return MorError.exit_code


if __name__ == '__main__':
    _sys.exit(main())
