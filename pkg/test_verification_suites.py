"""Tests for suite options, model loading and the cheaper suites"""

from fractions import Fraction

import pytest

from contact_jacobi import verify_jacobi_identity
from engine_errors import UsageError
from settings import EngineSettings
from verification_report import FAIL, MEASURED, PASS, PASS_MOD_CONSTRAINT, CheckRecord
from verification_suites import (
    PROPERTY_RUNS, SuiteOptions, bracket_property_check, build_report, jacobi_functions, load_model,
    run_suite, working_pair,
)


def test_options_are_validated():
    with pytest.raises(UsageError):
        SuiteOptions(mode='loose')
    with pytest.raises(UsageError):
        SuiteOptions(corrupt='theta')
    assert SuiteOptions().seed == EngineSettings().seed


def test_load_model_rules():
    assert load_model('lagrangian', Fraction(1)).name == 'lagrangian'
    with pytest.raises(UsageError):
        load_model('lagrangian', Fraction(2))
    with pytest.raises(UsageError):
        load_model('three-point')


def test_working_pair_variants(mass_shell):
    assert working_pair(mass_shell, SuiteOptions()) is mass_shell.pair
    paper = working_pair(mass_shell, SuiteOptions(mode='paper'))
    assert paper.bivector != mass_shell.pair.bivector
    corrupted = working_pair(mass_shell, SuiteOptions(corrupt='gamma'))
    assert corrupted.reeb != mass_shell.pair.reeb


def test_model_suite_records_carry_model_and_mode():
    check = lambda: CheckRecord('sample', 'ref', PASS)
    stamped = build_report('two-point', [check], SuiteOptions(mode='paper'))
    assert [(r.model, r.mode) for r in stamped.checks] == [('two-point', 'paper')]
    plain = build_report('operator', [check], SuiteOptions())
    assert [(r.model, r.mode) for r in plain.checks] == [(None, None)]


@pytest.mark.parametrize('model_name', ['mass_shell', 'two_point'])
def test_bracket_properties_on_random_functions(request, model_name):
    model = request.getfixturevalue(model_name)
    records = bracket_property_check(model, model.pair, 'm/', EngineSettings().seed)
    assert [r.id for r in records] == ['m/antisymmetry', 'm/leibniz-defect', 'm/hamiltonian-homomorphism']
    for record in records:
        assert record.status == PASS_MOD_CONSTRAINT
        assert record.measured == f"{PROPERTY_RUNS}/{PROPERTY_RUNS} samples"


def test_bracket_properties_see_a_corrupted_reeb_field(mass_shell):
    broken = working_pair(mass_shell, SuiteOptions(corrupt='gamma'))
    records = {r.id: r for r in bracket_property_check(mass_shell, broken, '', 7, runs=10)}
    assert records['antisymmetry'].status == PASS_MOD_CONSTRAINT
    assert records['hamiltonian-homomorphism'].status == FAIL
    assert records['hamiltonian-homomorphism'].residual.startswith('samples')


def test_jacobi_identity_with_a_product_function(mass_shell):
    functions = jacobi_functions(mass_shell)
    assert functions[-1] == mass_shell.x(0) * mass_shell.p(1)
    record = verify_jacobi_identity(mass_shell.pair, functions)
    assert record.status == PASS_MOD_CONSTRAINT
    assert record.measured == "125/125 triples"


def test_operator_suite_passes():
    report = run_suite('operator')
    assert report.exit_code == 0
    measured = {r.id for r in report.checks if r.status == MEASURED}
    assert 'operator/symbol-normalization' in measured


def test_peierls_suite_passes_and_detects_corruption():
    assert run_suite('peierls').exit_code == 0
    broken = run_suite('peierls', SuiteOptions(corrupt='gamma'))
    assert [r.id for r in broken.checks if r.status == FAIL] == ['peierls/mass-shell-consistency']


def test_unknown_suite():
    with pytest.raises(UsageError):
        run_suite('everything')
