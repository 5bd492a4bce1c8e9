"""Tests for forms, multivectors and their calculus"""

from fractions import Fraction

import pytest

from conftest import FREE_VARS, PROPERTY_RUNS, random_poly, random_tensor
from engine_errors import ChartMismatch, DegreeTooLow, OperationCancelled
from exact_algebra import ConstraintContext, QuadraticRule, make_ring
from exterior_calculus import (
    CancellationToken, Chart, DifferentialForm, MultivectorField, SmoothMap, apply_vector,
    coordinate_differential, coordinate_vector, differential, exterior_derivative, function_form,
    interior_bivector, interior_vector, is_nonvanishing_top, lie_derivative, pair_bivector,
    change_chart, pullback, restrict, schouten_bracket, schouten_bracket_recursive, top_coefficient,
    vanishes_at, wedge, wedge_all,
)


def dx(chart, name):
    return coordinate_differential(chart, name)


def at(chart, name):
    return coordinate_vector(chart, name)


def test_wedge_is_graded_commutative(free_chart):
    a, b = dx(free_chart, 'x'), dx(free_chart, 'y')
    assert wedge(a, b) == -wedge(b, a)
    assert wedge(a, a).is_zero
    assert str(wedge(a, b)) == "d(x)/\\d(y)"


def test_differential_of_product(free_chart):
    ctx = free_chart.context
    x, y = ctx.symbol('x'), ctx.symbol('y')
    assert differential(free_chart, x * y) == dx(free_chart, 'x') * y + dx(free_chart, 'y') * x


def test_interior_products(free_chart):
    area = wedge(dx(free_chart, 'x'), dx(free_chart, 'y'))
    assert interior_vector(at(free_chart, 'x'), area) == dx(free_chart, 'y')
    assert interior_vector(at(free_chart, 'y'), area) == -dx(free_chart, 'x')
    bivector = wedge(at(free_chart, 'x'), at(free_chart, 'y'))
    assert interior_bivector(bivector, area) == function_form(free_chart, 1)
    with pytest.raises(DegreeTooLow):
        interior_bivector(bivector, dx(free_chart, 'x'))


def test_bivector_pairing(free_chart):
    bivector = wedge(at(free_chart, 'x'), at(free_chart, 'y'))
    assert pair_bivector(bivector, dx(free_chart, 'x'), dx(free_chart, 'y')) == 1
    assert pair_bivector(bivector, dx(free_chart, 'y'), dx(free_chart, 'x')) == -1


def test_schouten_low_degrees(free_chart):
    ctx = free_chart.context
    x, y = ctx.symbol('x'), ctx.symbol('y')
    f = MultivectorField.scalar(free_chart, x * x * y)
    field = at(free_chart, 'x') * y
    assert schouten_bracket(field, f).value() == apply_vector(field, x * x * y)
    assert schouten_bracket(f, field).value() == -apply_vector(field, x * x * y)

    first, second = at(free_chart, 'y') * x, at(free_chart, 'x') * y
    assert schouten_bracket(first, second) == at(free_chart, 'x') * x - at(free_chart, 'y') * y


def test_schouten_graded_antisymmetry_and_jacobi(free_chart, rng):
    for _ in range(PROPERTY_RUNS):
        p, q, r = (int(d) for d in rng.integers(0, 3, size=3))
        P = random_tensor(MultivectorField, free_chart, p, rng)
        Q = random_tensor(MultivectorField, free_chart, q, rng)
        R = random_tensor(MultivectorField, free_chart, r, rng)
        swap = (-1) ** ((p - 1) * (q - 1))
        assert schouten_bracket(P, Q) == -(schouten_bracket(Q, P) * swap)

        total = (schouten_bracket(P, schouten_bracket(Q, R)) * (-1) ** ((p - 1) * (r - 1))
                 + schouten_bracket(Q, schouten_bracket(R, P)) * (-1) ** ((q - 1) * (p - 1))
                 + schouten_bracket(R, schouten_bracket(P, Q)) * (-1) ** ((r - 1) * (q - 1)))
        assert total.is_zero


def test_recursive_schouten_matches_component_formula(free_chart, rng):
    for _ in range(PROPERTY_RUNS):
        p, q = (int(d) for d in rng.integers(0, 3, size=2))
        P = random_tensor(MultivectorField, free_chart, p, rng, poly_degree=2)
        Q = random_tensor(MultivectorField, free_chart, q, rng, poly_degree=2)
        assert schouten_bracket_recursive(P, Q) == schouten_bracket(P, Q)


def test_recursive_schouten_on_mass_shell_bivector(mass_shell):
    bivector = mass_shell.pair.bivector
    square = schouten_bracket_recursive(bivector, bivector)
    assert square == schouten_bracket(bivector, bivector)
    assert square == wedge(mass_shell.pair.reeb, bivector) * 2


def test_d_squared_vanishes(free_chart, rng):
    for _ in range(PROPERTY_RUNS):
        degree = int(rng.integers(0, 3))
        form = random_tensor(DifferentialForm, free_chart, degree, rng, terms=3, poly_degree=3)
        assert exterior_derivative(exterior_derivative(form)).is_zero


def test_pullback_commutes_with_d(free_chart, rng):
    ctx = free_chart.context
    for _ in range(PROPERTY_RUNS):
        images = {name: random_poly(ctx, free_chart.coordinates, rng, terms=2, degree=2)
                  for name in free_chart.coordinates}
        smooth_map = SmoothMap.build(free_chart, free_chart, images)
        form = random_tensor(DifferentialForm, free_chart, int(rng.integers(0, 2)), rng)
        assert pullback(smooth_map, exterior_derivative(form)) == exterior_derivative(pullback(smooth_map, form))


def test_pullback_respects_wedge(free_chart):
    ctx = free_chart.context
    x, y = ctx.symbol('x'), ctx.symbol('y')
    polar = SmoothMap.build(free_chart, free_chart, {'x': x * y, 'y': y + x * x, 'z': ctx.symbol('z'),
                                                    'u': ctx.symbol('u'), 'v': ctx.symbol('v')})
    a, b = dx(free_chart, 'x'), dx(free_chart, 'y')
    assert pullback(polar, wedge(a, b)) == wedge(pullback(polar, a), pullback(polar, b))


def test_cartan_formula_on_functions(free_chart):
    ctx = free_chart.context
    x, z = ctx.symbol('x'), ctx.symbol('z')
    field = at(free_chart, 'x') * z + at(free_chart, 'z') * x
    f = x * x * z
    assert lie_derivative(field, differential(free_chart, f)) == differential(free_chart, apply_vector(field, f))


def test_top_form_witness(free_chart):
    volume = wedge_all([dx(free_chart, name) for name in free_chart.coordinates])
    assert top_coefficient(volume) == 1
    assert is_nonvanishing_top(volume)
    x = free_chart.context.symbol('x')
    assert not is_nonvanishing_top(volume * (x - 1))


def test_vanishing_with_two_solved_variables():
    bare = ConstraintContext(make_ring(('a', 'b', 'u', 'v')), (), frozenset(), 'bare')
    a = bare.gen('a')
    ctx = bare.with_rules([QuadraticRule('u', bare.ring.zero, a),
                           QuadraticRule('v', bare.ring.zero, a * 3 + 1)], 'two-roots')
    u, v, b = ctx.symbol('u'), ctx.symbol('v'), ctx.symbol('b')
    point = {'a': Fraction(1), 'b': Fraction(0)}
    assert vanishes_at(u + v - 3, point)
    assert vanishes_at(u * v + 2, point)
    assert not vanishes_at(u + v - 4, point)
    with pytest.raises(ChartMismatch):
        vanishes_at(u + b, {'a': Fraction(1)})


def test_restrict_requires_tangency(mass_shell):
    ambient, chart = mass_shell.ambient, mass_shell.chart
    with pytest.raises(ChartMismatch):
        restrict(at(ambient, 'p1'), chart)
    assert restrict(at(ambient, 'x1'), chart) == at(chart, 'x1')


def test_cancellation(free_chart):
    token = CancellationToken()
    token.cancel()
    assert token.cancelled
    with pytest.raises(OperationCancelled):
        wedge(dx(free_chart, 'x'), dx(free_chart, 'y'), token)


def test_change_chart(free_chart):
    copy = Chart('R5-copy', FREE_VARS, ConstraintContext(make_ring(FREE_VARS), (), frozenset(), 'R5-copy'))
    form = wedge(dx(free_chart, 'x'), dx(free_chart, 'y')) * free_chart.context.symbol('z')
    moved = change_chart(form, copy)
    assert moved.chart is copy
    assert str(moved) == str(form)

    plane = Chart('R2', ('x', 'y'), ConstraintContext(make_ring(('x', 'y')), (), frozenset(), 'R2'))
    with pytest.raises(ChartMismatch):
        change_chart(form, plane)
