"""Tests for the mass shell, two-point and Lagrangian models"""

from fractions import Fraction

import pytest

from engine_errors import NotCasimirFunction
from exact_algebra import minkowski_dot
from minkowski_models import (
    conformal_invariance_check, express_in_basis, hamiltonian_generator_checks, lagrangian_checks,
    mass_shell_table_checks, mass_shell_tangency_check, mass_shell_volume_check,
    poincare_invariance_check, structure_constants_check, two_point_checks, two_point_table_checks,
)
from contact_jacobi import jacobi_bracket
from verification_report import MEASURED, PASS_MOD_CONSTRAINT


def not_failed(records):
    return [r.id for r in records if r.failed]


def test_mass_shell_coordinate_brackets(mass_shell):
    pair = mass_shell.pair
    x0, x1, p0, p1 = mass_shell.x(0), mass_shell.x(1), mass_shell.p(0), mass_shell.p(1)
    assert str(jacobi_bracket(pair, x0, x1)) == "(x0*p1 - x1*p0)/m^2"
    assert jacobi_bracket(pair, p0, x0) == 1
    assert jacobi_bracket(pair, p1, x1) == -1
    assert jacobi_bracket(pair, p0, mass_shell.p(3)).is_zero


def test_mass_shell_table_checks(mass_shell):
    records = mass_shell_table_checks(mass_shell)
    assert {r.status for r in records} == {PASS_MOD_CONSTRAINT}


def test_mass_shell_table_is_antisymmetric(mass_shell):
    table = mass_shell.table()
    assert table.is_antisymmetric()
    assert table.lookup('x1', 'x0') == -table.lookup('x0', 'x1')


def test_specialized_mass(unit_mass_shell):
    model = unit_mass_shell
    x0, x2 = model.x(0), model.x(2)
    assert jacobi_bracket(model.pair, x0, x2) == x0 * model.p(2) - x2 * model.p(0)
    assert all('m' not in c.free_symbols() for c in model.pair.bivector.coeffs.values())


def test_mass_shell_geometry(mass_shell):
    volume = mass_shell_volume_check(mass_shell)
    assert not volume.failed and volume.measured.startswith("factor=")
    assert not mass_shell_tangency_check(mass_shell).failed
    assert not_failed(hamiltonian_generator_checks(mass_shell)) == []


def test_conformal_rescaling(mass_shell):
    free = mass_shell.ambient.context
    p = [free.symbol(f"p{mu}") for mu in range(4)]
    casimir = minkowski_dot(free, p, p)
    record = conformal_invariance_check(mass_shell, casimir * casimir + 3)
    assert record.status == PASS_MOD_CONSTRAINT
    assert record.measured == "constant=m^4 + 3"

    with pytest.raises(NotCasimirFunction):
        conformal_invariance_check(mass_shell, free.symbol('x0') * casimir)
    with pytest.raises(NotCasimirFunction):
        conformal_invariance_check(mass_shell, p[0])


def test_poincare_invariance_sample(mass_shell):
    fields = mass_shell.poincare_fields()
    assert len(fields) == 10
    sample = [fields[0], fields[-1]]
    records = poincare_invariance_check('mass-shell', sample,
                                        [('theta', mass_shell.theta), ('Lambda', mass_shell.pair.bivector)])
    assert len(records) == 4
    assert not_failed(records) == []


def test_structure_constants(mass_shell):
    records = structure_constants_check('mass-shell', mass_shell.generators(), mass_shell.pair)
    assert not_failed(records) == []
    constants = next(r for r in records if r.id == 'mass-shell/generators/constants')
    assert constants.status == MEASURED
    assert "[M01,P0]" in constants.measured


def test_express_in_basis(mass_shell):
    x0, p1 = mass_shell.x(0), mass_shell.p(1)
    assert express_in_basis(x0 * 2 - p1 / 3, [x0, p1]) == [Fraction(2), Fraction(-1, 3)]
    assert express_in_basis(x0 * p1, [x0, p1]) is None


def test_two_point_relations(two_point):
    records = two_point_table_checks(two_point)
    assert not_failed(records) == []
    printed = records[-1]
    assert printed.status == MEASURED and printed.measured.endswith("= -2")
    assert jacobi_bracket(two_point.pair, two_point.u(1), two_point.w(1)) == -2


def test_two_point_ledger(two_point):
    factor, generators = two_point_checks(two_point)
    assert factor.measured == "c=4"
    assert not generators.failed


def test_lagrangian_model(lagrangian, unit_mass_shell):
    records = lagrangian_checks(lagrangian, unit_mass_shell)
    assert not_failed(records) == []
    assert lagrangian.context.symbol('v0') ** 2 == 1 + sum(lagrangian.v(i) ** 2 for i in (1, 2, 3))
