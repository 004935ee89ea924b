import math

import click
import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import InvalidArgument
from helpers import as_callback, parse_grid, parse_int_list, parse_perturbations, setting
from numerics import DOUBLE, HighPrecision, get_backend
from utils import ComplexAccumulator, complex_fsum, max_abs, principal_arg, relative_gap, snap


def test_default_alpha_grid():
    grid = parse_grid('0.1:3.0:0.1')
    assert len(grid) == 30
    assert grid[0] == 0.1
    assert grid[-1] == 3.0


@pytest.mark.parametrize('text, expected', [
    ('0.7', [0.7]),
    ('0.5,1.0,2.2', [0.5, 1.0, 2.2]),
    ('0.1:0.3:0.1', [0.1, 0.2, 0.3]),
    ('0.1:0.35:0.1', [0.1, 0.2, 0.3]),
    ('1:1:0.5', [1.0]),
])
def test_grid_forms(text, expected):
    assert parse_grid(text) == pytest.approx(expected)


@pytest.mark.parametrize('text', ['', '  ', '0.1:0.3', '0.1:0.3:0', '0.3:0.1:0.1', 'x', '0.1:nan:0.1', 'inf'])
def test_bad_grids(text):
    with pytest.raises(InvalidArgument):
        parse_grid(text)


def test_integer_lists():
    assert parse_int_list('0,1') == [0, 1]
    assert parse_int_list('-1:1') == [-1, 0, 1]
    for text in ('', '1:0', 'a,b'):
        with pytest.raises(InvalidArgument):
            parse_int_list(text)


def test_perturbations():
    assert parse_perturbations(['a:1.01', ' sigma : 0.1']) == {'a': 1.01, 'sigma': 0.1}
    assert parse_perturbations(()) == {}
    for item in ('a', ':1.0', 'a:x'):
        with pytest.raises(InvalidArgument):
            parse_perturbations([item])


def test_callback_turns_parse_errors_into_usage_errors():
    callback = as_callback(parse_grid)
    assert callback(None, None, None) is None
    assert callback(None, None, ()) == {}
    assert callback(None, None, '0.5') == [0.5]
    with pytest.raises(click.BadParameter):
        callback(None, None, 'x')


def test_setting_reads_app_config(app):
    with app.app_context():
        assert setting(None, 'LOOPLAB_SEED') == app.config['LOOPLAB_SEED']
        assert setting(3, 'LOOPLAB_SEED') == 3


@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False))
def test_principal_arg_range(z):
    angle = principal_arg(z)
    assert -math.pi < angle <= math.pi


def test_principal_arg_of_negative_real():
    assert principal_arg(-1 + 0j) == pytest.approx(math.pi)
    assert principal_arg(-1 - 0j) == pytest.approx(math.pi)


def test_snap_identifies_nearby_points():
    assert snap(0.5 + 0.25j) == snap(0.5 + 1e-12 + 0.25j)
    assert snap(0.5) != snap(0.5 + 1e-6)


def test_compensated_sums():
    values = [1e16, 1.0, -1e16, 1j]
    assert complex_fsum(values) == 1 + 1j
    first, second = ComplexAccumulator(), ComplexAccumulator()
    first.add(1e16)
    first.add(1.0)
    second.add(-1e16)
    assert first.merge(second).value == 1.0


def test_magnitudes():
    assert max_abs([1, -3, 2j]) == 3
    assert max_abs([]) == 0.0
    assert relative_gap(100.0, 101.0) == pytest.approx(1 / 101)
    assert relative_gap(0.0, 1e-3) == pytest.approx(1e-3)


def test_backends():
    assert get_backend() is DOUBLE
    assert get_backend('high', 30).digits == 30
    with pytest.raises(InvalidArgument):
        get_backend('quad')
    with pytest.raises(InvalidArgument):
        HighPrecision(10)


def test_high_precision_context_is_local():
    from mpmath import mp

    before = mp.dps
    backend = HighPrecision(40)
    with backend.context():
        assert mp.dps == 40
        value = backend.to_complex(backend.expi(backend.pi))
    assert mp.dps == before
    assert value == pytest.approx(-1)
