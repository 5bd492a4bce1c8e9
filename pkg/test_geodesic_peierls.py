"""Tests for timelike geodesics, Jacobi fields and Peierls brackets"""

from fractions import Fraction

import pytest

from engine_errors import UsageError
from geodesic_peierls import (
    DeltaFunctional, Geodesic, GreenKernel, JacobiField, advanced_kernel, decompose_jacobi_field,
    jacobi_operator_apply, kernel_source, mat_mul, mat_vec, omega_eval, parse_functional,
    parse_geodesic, peierls_bracket, projector, reparam_invariant, retarded_kernel, theta_eval,
)
from exact_algebra import partial_derivative


@pytest.fixture(scope='module')
def geodesic():
    return Geodesic.symbolic()


@pytest.fixture(scope='module')
def resting():
    return parse_geodesic("x0=[0,0,0,0],k=[1,0,0,0]")


def vector(ctx, prefix):
    return [ctx.symbol(f"{prefix}{mu}") for mu in range(4)]


def transpose(matrix):
    return [list(row) for row in zip(*matrix)]


def test_projector_kills_velocity(geodesic):
    lower = projector(geodesic, 'lower')
    assert all(entry.is_zero for entry in mat_vec(lower, geodesic.velocity))
    mixed = projector(geodesic, 'mixed')
    assert mat_mul(mixed, mixed) == mixed
    with pytest.raises(ValueError):
        projector(geodesic, 'sideways')


def test_jacobi_operator(geodesic):
    ctx = geodesic.context
    s = geodesic.parameter
    along = JacobiField.along(geodesic, 2, 3).at(s)
    assert all(entry.is_zero for entry in jacobi_operator_apply(geodesic, along))
    k1 = ctx.symbol('k1')
    bent = jacobi_operator_apply(geodesic, [ctx.zero, s * s, ctx.zero, ctx.zero])
    assert bent[1] == -2 - k1 * k1 * 2


def test_decomposition(geodesic):
    ctx = geodesic.context
    field = JacobiField(vector(ctx, 'a'), vector(ctx, 'b'))
    perp, a, b = decompose_jacobi_field(geodesic, field)
    assert theta_eval(geodesic, perp).is_zero
    assert theta_eval(geodesic, field) == a * geodesic.parameter + b
    assert theta_eval(geodesic, JacobiField.along(geodesic, 2, 3)) == geodesic.parameter * 2 + 3


def test_omega_is_conserved_and_antisymmetric(geodesic):
    ctx = geodesic.context
    first = JacobiField(vector(ctx, 'a'), vector(ctx, 'b'))
    second = JacobiField(vector(ctx, 'b'), [ctx.symbol('c1'), ctx.zero, ctx.symbol('c2'), ctx.one])
    value = omega_eval(geodesic, first, second)
    assert partial_derivative(value, 's').is_zero
    assert omega_eval(geodesic, second, first) == -value
    assert omega_eval(geodesic, JacobiField.along(geodesic, 1, 0), first).is_zero


def test_worked_example(geodesic):
    ctx = geodesic.context
    a = parse_functional("x0 @ s=0", ctx)
    b = parse_functional("x1 @ s=0", ctx)
    assert str(peierls_bracket(geodesic, a, b)) == "x0*k1 - x1*k0"

    a = parse_functional("x0 @ s=s1", ctx)
    b = parse_functional("x1 @ s=s1", ctx)
    assert str(peierls_bracket(geodesic, a, b)) == "x0*k1 - x1*k0"


def test_separated_times(geodesic):
    ctx = geodesic.context
    a = parse_functional("x1 @ s=1", ctx)
    b = parse_functional("x1 @ s=2", ctx)
    assert peierls_bracket(geodesic, a, b) == 1
    assert peierls_bracket(geodesic, b, a) == -1
    assert peierls_bracket(geodesic, a, a).is_zero


def test_gauge_terms_drop_out_transverse_to_the_flow(resting):
    ctx = resting.context
    gauged = GreenKernel(resting, ctx.const(5), ctx.const(7))
    a = parse_functional("x1 @ s=1", ctx)
    b = parse_functional("x2 @ s=3; x1 @ s=2", ctx)
    assert peierls_bracket(resting, a, b, gauged) == peierls_bracket(resting, a, b)

    along_a = parse_functional("x0 @ s=1", ctx)
    along_b = parse_functional("x0 @ s=2", ctx)
    assert peierls_bracket(resting, along_a, along_b) == -1
    assert peierls_bracket(resting, along_a, along_b, gauged) == 1


def test_reparametrization_invariance(geodesic):
    ctx = geodesic.context
    assert reparam_invariant(parse_functional("x0 @ s=1; -x0 @ s=2", ctx), geodesic)
    assert not reparam_invariant(parse_functional("x0 @ s=1", ctx), geodesic)
    assert reparam_invariant(DeltaFunctional(), geodesic)


@pytest.mark.parametrize("make", [retarded_kernel, advanced_kernel])
def test_kernels_source_the_projector(geodesic, make):
    deltas, regular_zero = kernel_source(geodesic, make(geodesic, 0))
    assert regular_zero
    assert deltas == transpose(projector(geodesic, 'mixed'))


def test_parse_geodesic():
    moving = parse_geodesic("x0=[0,1,0,0], k=[5/4,3/4,0,0]")
    assert moving.velocity[1] == Fraction(3, 4)
    assert parse_geodesic("symbolic").velocity[0].free_symbols() == {'k0'}
    with pytest.raises(UsageError):
        parse_geodesic("x0=[0,0,0,0],k=[1,1,0,0]")
    with pytest.raises(UsageError):
        parse_geodesic("x0=[0,0,0],k=[1,0,0,0]")
    with pytest.raises(UsageError):
        parse_geodesic("sideways")


def test_parse_functional(geodesic):
    ctx = geodesic.context
    functional = parse_functional("x0 @ s=1; x1^2 @ s=s1", ctx)
    assert len(functional.atoms) == 2
    assert str(functional) == "x0 @ s=1 + x1^2 @ s=s1"
    with pytest.raises(UsageError):
        parse_functional("k0 @ s=1", ctx)
    with pytest.raises(UsageError):
        parse_functional("x0", ctx)
