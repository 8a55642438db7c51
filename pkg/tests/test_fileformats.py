import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import FIXTURES
from mormatch.benchmarks import generate
from mormatch.errors import ParseError, SpecError
from mormatch.fileformats import (format_complex, format_number, parse_complex, parse_model,
                                  parse_spec, read_model, render_model)
from mormatch.lti import StateSpace


class TestModelFile:
    def test_fixture(self):
        kind, sys = read_model(FIXTURES / 'two_pole.txt')
        assert kind == 'full'
        np.testing.assert_array_equal(sys.A, np.diag([-1.0, -2.0]))
        np.testing.assert_array_equal(sys.C, [[1.0, -1.0]])

    def test_reduced_sections(self):
        kind, sys = parse_model('[F]\n-0.5\n[G]\n1\n[H]\n2  # trailing comment\n')
        assert kind == 'reduced'
        assert sys.C[0, 0] == 2.0

    @pytest.mark.parametrize('text,line', [
        ('[A]\n1 2\n3\n[B]\n1\n1\n[C]\n1 1\n', 3),
        ('[A]\n-1\n[X]\n1\n', 3),
        ('[A]\n-1\n[A]\n-1\n', 3),
        ('[A]\n-1 abc\n', 2),
        ('-1\n[A]\n', 1),
    ])
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(ParseError, match=f'line {line}:') as info:
            parse_model(text)
        assert info.value.line == line

    def test_missing_section(self):
        with pytest.raises(ParseError):
            parse_model('[A]\n-1\n[B]\n1\n')

    def test_inconsistent_dimensions(self):
        with pytest.raises(ParseError, match='dimension'):
            parse_model('[A]\n-1 0\n0 -1\n[B]\n1\n[C]\n1 0\n')

    def test_render_shape(self):
        text = render_model(StateSpace([[-1.0]], [[1.0]], [[0.5]]), 'reduced', comment='x')
        assert text == '# x\n[F]\n-1\n[G]\n1\n[H]\n0.5\n'

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 5), st.integers(0, 2 ** 31))
    def test_round_trip_is_bit_exact(self, n, seed):
        rng = np.random.default_rng(seed)
        scale = 10.0 ** rng.integers(-300, 300, size=(n + 2, n))
        M = rng.standard_normal((n + 2, n)) * scale
        sys = StateSpace(M[:n], M[n].reshape(n, 1), M[n + 1].reshape(1, n))
        _, back = parse_model(render_model(sys))
        for a, b in ((sys.A, back.A), (sys.B, back.B), (sys.C, back.C)):
            assert np.array_equal(a, b)

    @pytest.mark.parametrize('kind', ['rc-ladder', 'random-stable'])
    @pytest.mark.parametrize('n', [1, 3, 8])
    def test_benchmarks_round_trip(self, kind, n):
        sys = generate(kind, n, seed=n)
        _, back = parse_model(render_model(sys))
        assert np.array_equal(sys.A, back.A) and np.array_equal(sys.C, back.C)


class TestNumbers:
    def test_at_most_17_digits(self):
        for x in (1 / 3, -66 / 85, 1e-300, 2.0 ** 0.5):
            digits = format_number(x).lstrip('-').split('e')[0].replace('.', '').lstrip('0')
            assert len(digits) <= 17
            assert float(format_number(x)) == x

    def test_examples(self):
        assert format_number(-66 / 85) == '-0.7764705882352941'
        assert format_number(33 / 85) == '0.38823529411764707'
        assert format_number(1.0) == '1'
        assert format_complex(1 - 2j) == '1-2i'

    @pytest.mark.parametrize('text,value', [
        ('0', 0), ('-1.5', -1.5), ('2i', 2j), ('-2i', -2j), ('i', 1j), ('-i', -1j),
        ('1+2i', 1 + 2j), ('1-2i', 1 - 2j), ('1e-3+2.5e1i', 0.001 + 25j), ('3j', 3j),
    ])
    def test_complex_literals(self, text, value):
        assert parse_complex(text) == value

    @pytest.mark.parametrize('text', ['', 'abc', '1+', '1+2', '2ii'])
    def test_bad_literals(self, text):
        with pytest.raises(ValueError):
            parse_complex(text)


class TestSpec:
    def test_smith_lucas(self):
        spec = parse_spec('method = smith-lucas\nr = 1\nq = 1\n')
        assert (spec.method, spec.r, spec.q) == ('smith-lucas', 1, 1)

    def test_points_and_poles(self):
        spec = parse_spec('# comment\nmethod = sylvester\npoints = 0, 2i, -2i\norders = 1, 0, 0\n'
                          'delta-poles = -1, -2, -3, -4\n')
        assert spec.points == (0, 2j, -2j)
        assert spec.data().nu == 4
        assert spec.delta_poles == (-1, -2, -3, -4)

    @pytest.mark.parametrize('text', [
        'method = magic\n',
        'method = smith-lucas\nr = 1\n',
        'method = sylvester\npoints = 1i\norders = 0\n',
        'method = sylvester\npoints = 0, 1\norders = 0\n',
        'method = krylov\npoints = 0\norders = 1\nr = 1\n',
        'method = lsmm\npoints = 0\norders = 3\n',
        'method = lsmm\npoints = 0\norders = 3\nr = 4\n',
        'method = sylvester\npoints = 0\norders = 1\ndelta-poles = -1\n',
        'method = krylov\npoints = 0\norders = 0\ndelta-poles = -1\n',
        'method = sylvester\nmethod = krylov\n',
        'colour = blue\n',
        'method\n',
        'method = smith-lucas\nr = one\nq = 1\n',
    ])
    def test_malformed(self, text):
        with pytest.raises(SpecError):
            parse_spec(text)
