"""
Operator Symbols
================
Differential operators with polynomial coefficients. Commute them with S
until only a function is left.
"""

import logging
import re
from math import comb, factorial
from typing import Dict, Optional, Sequence, Tuple

from sympy.polys.domains import QQ_I
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from engine_errors import (
    ChartMismatch, NonConstantCoefficients, NotMultiplication, ParseError,
)
from exact_algebra import (
    METRIC, ConstraintContext, QuadraticRule, RatExpr, make_ring, partial_derivative, recontext,
    scalar_to_fraction, substitute,
)
from exterior_calculus import Chart
from expression_parser import ExpressionParser

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]

OPERATOR_VARS = (tuple(f"x{i}" for i in range(4)) + tuple(f"y{i}" for i in range(4))
                 + tuple(f"k{i}" for i in range(4)) + tuple(f"p{i}" for i in range(4)) + ('m',))


class DifferentialOperator:
    """sum_alpha c_alpha d^alpha, coefficients to the left"""

    def __init__(self, chart: Chart, terms: Optional[Dict[MultiIndex, RatExpr]] = None):
        self.chart = chart
        self.terms: Dict[MultiIndex, RatExpr] = {}
        for alpha, coeff in (terms or {}).items():
            self._accumulate(alpha, coeff)

    def _accumulate(self, alpha: MultiIndex, coeff):
        coeff = self.chart.context.coerce(coeff)
        if coeff.is_zero:
            return
        total = self.terms.get(alpha, self.chart.context.zero) + coeff
        if total.is_zero:
            self.terms.pop(alpha, None)
        else:
            self.terms[alpha] = total

    # -- constructors ----------------------------------------------------------

    @classmethod
    def multiplication(cls, chart: Chart, f) -> 'DifferentialOperator':
        return cls(chart, {(0,) * chart.dim: f})

    @classmethod
    def derivative(cls, chart: Chart, name: str, times: int = 1) -> 'DifferentialOperator':
        alpha = [0] * chart.dim
        alpha[chart.index(name)] = times
        return cls(chart, {tuple(alpha): 1})

    @classmethod
    def identity(cls, chart: Chart) -> 'DifferentialOperator':
        return cls.multiplication(chart, 1)

    @classmethod
    def dalembertian(cls, chart: Chart, prefix: str = 'x') -> 'DifferentialOperator':
        """d0^2 - d1^2 - d2^2 - d3^2"""
        box = cls(chart)
        for mu in range(4):
            box = box + cls.derivative(chart, f"{prefix}{mu}", 2) * METRIC[mu]
        return box

    # -- structure -------------------------------------------------------------

    @property
    def order(self) -> int:
        return max((sum(alpha) for alpha in self.terms), default=0)

    @property
    def is_multiplication(self) -> bool:
        return self.order == 0

    def zeroth_order(self) -> RatExpr:
        return self.terms.get((0,) * self.chart.dim, self.chart.context.zero)

    def apply(self, f: RatExpr) -> RatExpr:
        total = self.chart.context.zero
        for alpha, coeff in self.terms.items():
            total = total + coeff * _derive(f, self.chart, alpha)
        return total

    # -- arithmetic --------------------------------------------------------------

    def _lift(self, other) -> 'DifferentialOperator':
        if isinstance(other, DifferentialOperator):
            if other.chart != self.chart:
                raise ChartMismatch(f"operators on {self.chart.name} and {other.chart.name}")
            return other
        return DifferentialOperator.multiplication(self.chart, other)

    def __add__(self, other):
        other = self._lift(other)
        result = DifferentialOperator(self.chart, self.terms)
        for alpha, coeff in other.terms.items():
            result._accumulate(alpha, coeff)
        return result

    __radd__ = __add__

    def __neg__(self):
        return DifferentialOperator(self.chart, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        return compose(self, self._lift(other))

    def __rmul__(self, other):
        return compose(self._lift(other), self)

    def __truediv__(self, other):
        scalar = self.chart.context.coerce(other)
        return DifferentialOperator(self.chart, {a: c / scalar for a, c in self.terms.items()})

    def __pow__(self, exp: int):
        result = DifferentialOperator.identity(self.chart)
        for _ in range(exp):
            result = compose(result, self)
        return result

    def __eq__(self, other):
        if not isinstance(other, DifferentialOperator):
            return NotImplemented
        return self.chart == other.chart and self.terms == other.terms

    __hash__ = None

    def __str__(self):
        if not self.terms:
            return '0'
        parts = []
        for alpha in sorted(self.terms, key=lambda a: (-sum(a), [-e for e in a])):
            factors = []
            for name, e in zip(self.chart.coordinates, alpha):
                if e == 1:
                    factors.append(f"d({name})")
                elif e > 1:
                    factors.append(f"d{e}({name})")
            coeff = str(self.terms[alpha])
            if len(self.terms[alpha].num) > 1 or self.terms[alpha].den != self.chart.context.ring.one:
                coeff = f"({coeff})"
            parts.append('*'.join([coeff] + factors))
        text = parts[0]
        for part in parts[1:]:
            text += f" - {part[1:]}" if part.startswith('-') else f" + {part}"
        return text


def _derive(f: RatExpr, chart: Chart, alpha: MultiIndex) -> RatExpr:
    for name, e in zip(chart.coordinates, alpha):
        for _ in range(e):
            f = partial_derivative(f, name)
    return f


def _multi_sub_indices(alpha: MultiIndex):
    """All gamma <= alpha componentwise, with the product of binomials"""
    results = [((), 1)]
    for a in alpha:
        results = [(gamma + (g,), weight * comb(a, g)) for gamma, weight in results for g in range(a + 1)]
    return results


def compose(first: DifferentialOperator, second: DifferentialOperator) -> DifferentialOperator:
    """first o second, Leibniz-expanded to canonical form"""
    if first.chart != second.chart:
        raise ChartMismatch(f"operators on {first.chart.name} and {second.chart.name}")
    chart = first.chart
    result = DifferentialOperator(chart)
    for alpha, c in first.terms.items():
        splits = _multi_sub_indices(alpha)
        for beta, d in second.terms.items():
            for gamma, weight in splits:
                derived = _derive(d, chart, gamma)
                if derived.is_zero:
                    continue
                rest = tuple(a - g + b for a, g, b in zip(alpha, gamma, beta))
                result._accumulate(rest, c * derived * weight)
    return result


def commutator(first: DifferentialOperator, second: DifferentialOperator) -> DifferentialOperator:
    return compose(first, second) - compose(second, first)


def iterated_symbol(operator: DifferentialOperator, generating: RatExpr) -> RatExpr:
    """k-fold commutator with S divided by k!, k the operator order"""
    k = operator.order
    if k < 1:
        raise NotMultiplication("operator of order 0 has no symbol to extract")
    multiplier = DifferentialOperator.multiplication(operator.chart, generating)
    current = operator
    for _ in range(k):
        current = commutator(current, multiplier)
    if not current.is_multiplication:
        raise NotMultiplication(f"{k}-fold commutator still has order {current.order}")
    return current.zeroth_order() / factorial(k)


def raw_iterated_commutator(operator: DifferentialOperator, generating: RatExpr) -> RatExpr:
    """k-fold commutator value before the k! normalization"""
    return iterated_symbol(operator, generating) * factorial(operator.order)


def plane_wave_conjugation(operator: DifferentialOperator, target: ConstraintContext,
                           momentum: str = 'p', sign: int = 1) -> RatExpr:
    """Order-0 part of e^{s i p.x} D e^{-s i p.x}, read with d_mu -> p_mu

    The literal conjugate replaces d_mu by d_mu - s i p_mu; its order-0 part
    is a Gaussian polynomial. The homomorphism p -> s i p then returns it to
    the real momentum variables of the target context.
    """
    chart = operator.chart
    for coeff in operator.terms.values():
        if coeff.free_symbols() & set(chart.coordinates):
            raise NonConstantCoefficients(f"coefficient {coeff} depends on {chart.name} coordinates")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")

    names = tuple(f"{momentum}{mu}" for mu in range(4))
    gaussian = PolyRing(','.join(names), QQ_I, grlex)
    unit = QQ_I(0, 1)
    shifts = [gaussian.gens[mu] * (unit * (-sign * METRIC[mu])) for mu in range(4)]

    total = target.zero
    for alpha, coeff in operator.terms.items():
        literal = gaussian.one
        for axis, e in enumerate(alpha):
            if e:
                mu = int(chart.coordinates[axis][-1])
                literal = literal * shifts[mu] ** e
        real = target.zero
        for monom, c in literal.terms():
            value = c * (unit * sign) ** sum(monom)
            if value.y != 0:
                raise ValueError(f"conjugated symbol of {operator} is not real")
            term = target.const(scalar_to_fraction(value.x))
            for name, e in zip(names, monom):
                if e:
                    term = term * target.symbol(name) ** e
            real = real + term
        total = total + real * substitute(coeff, {}, target)
    return total


def hj_residual(generating: RatExpr, constant, coordinates: Sequence[str],
                target: Optional[ConstraintContext] = None) -> RatExpr:
    """g^{mu nu} dS/dx^mu dS/dx^nu - c, read in the target context"""
    ctx = generating.context
    total = ctx.zero
    for mu, name in enumerate(coordinates):
        d = partial_derivative(generating, name)
        total = total + d * d * METRIC[mu]
    residual = total - ctx.coerce(constant)
    return recontext(residual, target) if target is not None else residual


# -- operator text ---------------------------------------------------------------------

DERIVATIVE_RE = re.compile(r"d(\d*)$")


class OperatorParser(ExpressionParser):
    """Expression grammar plus d(x0), d2(x0) derivative atoms"""

    def __init__(self, chart: Chart):
        super().__init__(chart.context)
        self.chart = chart

    def atom(self):
        token = self.peek
        match = DERIVATIVE_RE.match(token.text) if token.kind == 'name' else None
        following = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else None
        if match and following is not None and following.text == '(':
            self.advance()
            self.advance()
            inner = self.advance()
            if inner.kind != 'name' or inner.text not in self.chart.coordinates:
                raise ParseError(f"'{inner.text}' is not a coordinate of {self.chart.name}", inner.column)
            if not self.accept(')'):
                raise ParseError("missing ')'", self.peek.column)
            times = int(match.group(1) or 1)
            return DifferentialOperator.derivative(self.chart, inner.text, times)
        return super().atom()


def parse_operator(text: str, chart: Chart) -> DifferentialOperator:
    value = OperatorParser(chart).parse(text)
    if isinstance(value, DifferentialOperator):
        return value
    return DifferentialOperator.multiplication(chart, value)


def operator_chart(context: Optional[ConstraintContext] = None) -> Chart:
    """Position chart x0..x3; every other variable is a parameter"""
    if context is None:
        ring = make_ring(OPERATOR_VARS)
        params = frozenset(OPERATOR_VARS[4:])
        context = ConstraintContext(ring, (), params, 'operators')
    return Chart('R4', OPERATOR_VARS[:4], context)


def operator_shell(chart: Chart, prefix: str = 'k') -> ConstraintContext:
    """prefix . prefix = m^2 on the operator ring, solved for prefix0"""
    ctx = chart.context
    ring = ctx.ring
    constant = ctx.gen('m') ** 2
    for i in (1, 2, 3):
        constant = constant + ctx.gen(f"{prefix}{i}") ** 2
    return ctx.with_rules([QuadraticRule(f"{prefix}0", ring.zero, constant)], f"{prefix}-shell")


def separation_shell(chart: Chart) -> ConstraintContext:
    """(x - y)^2 = m^2 on the operator ring, solved for y0"""
    ctx = chart.context
    x0 = ctx.gen('x0')
    constant = ctx.gen('m') ** 2 - x0 ** 2
    for i in (1, 2, 3):
        constant = constant + (ctx.gen(f"x{i}") - ctx.gen(f"y{i}")) ** 2
    return ctx.with_rules([QuadraticRule('y0', 2 * x0, constant)], 'separation-shell')
