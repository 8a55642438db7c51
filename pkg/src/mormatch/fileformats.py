"""Plain-text model files and reduction specifications.

A model file holds sections ``[A] [B] [C]`` (full model) or
``[F] [G] [H]`` (reduced model). Each section lists one matrix row per
line as whitespace-separated decimals; ``#`` starts a comment::

    # two-pole benchmark
    [A]
    -1 0
    0 -2
    [B]
    1
    1
    [C]
    1 -1

Values are rendered as the shortest decimal string that reads back as
the same double, never more than 17 significant digits.

A specification file uses ``key = value`` lines with keys ``method``,
``points``, ``orders``, ``r``, ``q`` and ``delta-poles``; lists are
comma-separated and complex literals are written ``a+bi``.
"""

import re
from dataclasses import dataclass

import numpy as np

from mormatch.errors import InvalidInterpolationData, ParseError, SpecError
from mormatch.generators import InterpolationData
from mormatch.lti import StateSpace

__all__ = ['parse_model', 'render_model', 'read_model', 'write_model', 'format_number',
           'format_complex', 'parse_complex', 'ReductionSpec', 'parse_spec', 'read_spec', 'METHODS']

FULL = ('A', 'B', 'C')
REDUCED = ('F', 'G', 'H')
METHODS = ('sylvester', 'krylov', 'lsmm', 'smith-lucas')


def format_number(x):
    """Shortest decimal that reads back as the same double (at most 17 digits)."""
    x = float(x)
    if x == 0:
        return '0'
    text = repr(x)
    return text[:-2] if text.endswith('.0') else text


def format_complex(z):
    z = complex(z)
    if z.imag == 0:
        return format_number(z.real)
    sign = '-' if np.signbit(z.imag) else '+'
    return f'{format_number(z.real)}{sign}{format_number(abs(z.imag))}i'


def parse_model(text):
    """Parse a model file into ``(kind, StateSpace)``.

    `kind` is ``'full'`` or ``'reduced'`` depending on the section names.
    """
    sections = {}
    current = None
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r'\[\s*([A-Za-z]+)\s*\]', line)
        if m:
            current = m.group(1)
            if current not in FULL + REDUCED:
                raise ParseError(f'unknown section [{current}]', lineno)
            if current in sections:
                raise ParseError(f'duplicate section [{current}]', lineno)
            sections[current] = []
            width = None
            continue
        if current is None:
            raise ParseError('data before the first section header', lineno)
        try:
            row = [float(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f'non-numeric entry in {line!r}', lineno) from None
        if width is not None and len(row) != width:
            raise ParseError(f'row has {len(row)} entries, expected {width}', lineno)
        width = len(row)
        sections[current].append(row)
    names = set(sections)
    if names == set(FULL):
        kind, keys = 'full', FULL
    elif names == set(REDUCED):
        kind, keys = 'reduced', REDUCED
    else:
        raise ParseError(f'expected sections [A][B][C] or [F][G][H], found {sorted(names)}')
    mats = []
    for key in keys:
        if not sections[key]:
            raise ParseError(f'section [{key}] is empty')
        mats.append(np.array(sections[key], dtype=float))
    try:
        sys = StateSpace(*mats)
    except Exception as exc:
        raise ParseError(f'inconsistent dimensions: {exc}') from None
    return kind, sys


def render_model(sys, kind='full', comment=None):
    keys = FULL if kind == 'full' else REDUCED
    lines = []
    if comment:
        lines += [f'# {c}' for c in comment.splitlines()]
    for key, M in zip(keys, (sys.A, sys.B, sys.C)):
        lines.append(f'[{key}]')
        lines += [' '.join(format_number(v) for v in row) for row in M]
    return '\n'.join(lines) + '\n'


def read_model(path):
    with open(path) as f:
        return parse_model(f.read())


def write_model(path, sys, kind='full', comment=None):
    with open(path, 'w') as f:
        f.write(render_model(sys, kind, comment))


_COMPLEX_RE = re.compile(
    r'^(?P<re>[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?'
    r'((?P<sign>[+-])?(?P<im>(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?(?P<unit>[ij]))?$')


def parse_complex(token):
    """Parse ``a``, ``bi``, ``a+bi`` or ``a-bi``; ``j`` is accepted for ``i``."""
    tok = token.strip().replace(' ', '')
    m = _COMPLEX_RE.match(tok)
    if not tok or not m or (m.group('re') is None and m.group('unit') is None):
        raise ValueError(f'not a complex literal: {token!r}')
    real = float(m.group('re')) if m.group('re') else 0.0
    imag = 0.0
    if m.group('unit'):
        mag = float(m.group('im')) if m.group('im') else 1.0
        imag = -mag if m.group('sign') == '-' else mag
        if m.group('re') and m.group('sign') is None:
            # "2i": the regex read the digits as the real part
            imag, real = (real if m.group('im') is None else imag), 0.0
    return complex(real, imag)


@dataclass(frozen=True)
class ReductionSpec:
    method: str
    points: tuple = ()
    orders: tuple = ()
    r: int = None
    q: int = None
    delta_poles: tuple = None

    def data(self):
        return InterpolationData(self.points, self.orders)


def _split_list(value):
    return [v for v in re.split(r'[,\s]+', value.strip()) if v]


def parse_spec(text):
    """Parse and validate a reduction specification."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise SpecError(f'line {lineno}: expected "key = value"')
        key, value = (s.strip() for s in line.split('=', 1))
        key = key.lower().replace('_', '-')
        if key not in ('method', 'points', 'orders', 'r', 'q', 'delta-poles'):
            raise SpecError(f'line {lineno}: unknown key {key!r}')
        if key in raw:
            raise SpecError(f'line {lineno}: duplicate key {key!r}')
        raw[key] = value
    method = raw.get('method')
    if method not in METHODS:
        raise SpecError(f'method must be one of {", ".join(METHODS)}; got {method!r}')
    try:
        points = tuple(parse_complex(t) for t in _split_list(raw.get('points', '')))
        orders = tuple(int(t) for t in _split_list(raw.get('orders', '')))
        r = int(raw['r']) if 'r' in raw else None
        q = int(raw['q']) if 'q' in raw else None
        poles = (tuple(parse_complex(t) for t in _split_list(raw['delta-poles']))
                 if 'delta-poles' in raw else None)
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    spec = ReductionSpec(method, points, orders, r, q, poles)
    if method == 'smith-lucas':
        if r is None or q is None:
            raise SpecError('smith-lucas needs r and q')
        if r < 1 or q < 0:
            raise SpecError('smith-lucas needs r >= 1 and q >= 0')
        return spec
    if not points:
        raise SpecError(f'{method} needs interpolation points')
    if len(orders) != len(points):
        raise SpecError(f'{len(points)} points but {len(orders)} orders')
    try:
        nu = spec.data().nu
    except InvalidInterpolationData as exc:
        raise SpecError(str(exc)) from None
    if method in ('sylvester', 'krylov') and r is not None and r != nu:
        raise SpecError(f'{method} reduces to r = nu = {nu}; got r={r}')
    if method == 'lsmm' and (r is None or not 1 <= r < nu):
        raise SpecError(f'lsmm needs 1 <= r < nu = {nu}')
    if poles is not None and method not in ('sylvester', 'lsmm'):
        raise SpecError('delta-poles only applies to sylvester and lsmm')
    if poles is not None and len(poles) != nu:
        raise SpecError(f'delta-poles needs {nu} entries')
    return spec


def read_spec(path):
    with open(path) as f:
        return parse_spec(f.read())
