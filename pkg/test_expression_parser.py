"""Tests for expression text parsing"""

import pytest

from engine_errors import ParseError
from expression_parser import parse_expression, tokenize
from minkowski_models import mass_shell_contexts


@pytest.fixture(scope='module')
def shell():
    return mass_shell_contexts()[1]


def test_tokens_carry_columns():
    tokens = tokenize("x0 + 12*p1")
    assert [(t.kind, t.text, t.column) for t in tokens] == [
        ('name', 'x0', 1), ('op', '+', 4), ('int', '12', 6), ('op', '*', 8), ('name', 'p1', 9), ('end', '', 11),
    ]


def test_precedence_and_powers(shell):
    x0, p1 = shell.symbol('x0'), shell.symbol('p1')
    assert parse_expression("x0 + 2*p1^2", shell) == x0 + p1 * p1 * 2
    assert parse_expression("-(x0 - 1)/2", shell) == (1 - x0) / 2
    assert parse_expression("p1^-1", shell) == 1 / p1


def test_reduces_on_parse(shell):
    m = shell.symbol('m')
    parsed = parse_expression("p0^2 - p1^2 - p2^2 - p3^2", shell)
    assert parsed == m * m


def test_canonical_round_trip(shell):
    text = "(x0*p1 - x1*p0)/m^2"
    assert str(parse_expression(text, shell)) == text


def test_unknown_symbol_column(shell):
    with pytest.raises(ParseError) as excinfo:
        parse_expression("x0 + q7", shell)
    assert excinfo.value.column == 6


@pytest.mark.parametrize("text, column", [
    ("x0 +", 5),
    ("(x0", 4),
    ("x0 $ p1", 4),
    ("x0^p1", 4),
    ("", 1),
])
def test_malformed_input(shell, text, column):
    with pytest.raises(ParseError) as excinfo:
        parse_expression(text, shell)
    assert excinfo.value.column == column


def test_division_by_shell_zero_is_a_parse_error(shell):
    with pytest.raises(ParseError):
        parse_expression("x0/(p0^2 - p1^2 - p2^2 - p3^2 - m^2)", shell)
