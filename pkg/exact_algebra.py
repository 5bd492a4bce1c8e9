"""
Exact Algebra
=============
Rational functions. Quadratic constraints. No floats.

Polynomials are sympy sparse ring elements over QQ in grlex order. A
ConstraintContext carries monic quadratic rewrite rules w^2 -> L*w + R
(L, R free of every leading variable), and every RatExpr is kept in the
normal form those rules define:

    * numerator reduced: each leading variable to degree <= 1
    * denominator free of leading variables (rationalized by conjugates)
    * gcd(numerator, denominator) = 1, denominator monic in grlex
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

from engine_errors import ContextMismatch, DivisionByZero, NoSolution, UnknownSymbol

logger = logging.getLogger(__name__)

Scalar = type(QQ(0))
Number = Union[int, Fraction]


@lru_cache(maxsize=None)
def make_ring(names: Tuple[str, ...]) -> PolyRing:
    """Polynomial ring over QQ with the declared variable order"""
    return PolyRing(','.join(names), QQ, grlex)


def to_scalar(value: Number) -> Scalar:
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    return QQ(int(value))


def scalar_to_fraction(value: Scalar) -> Fraction:
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


def _scalar_text(value: Scalar) -> str:
    num, den = int(QQ.numer(value)), int(QQ.denom(value))
    return f"{num}" if den == 1 else f"{num}/{den}"


def format_poly(poly: PolyElement, names: Sequence[str]) -> str:
    """Canonical text of a polynomial, terms in grlex descending order"""
    if not poly:
        return '0'

    parts = []
    for monom, coeff in poly.terms():
        sign = '-' if coeff < 0 else '+'
        magnitude = -coeff if coeff < 0 else coeff
        factors = [
            name if exp == 1 else f"{name}^{exp}"
            for name, exp in zip(names, monom) if exp
        ]
        if not factors:
            body = _scalar_text(magnitude)
        elif magnitude == 1:
            body = '*'.join(factors)
        else:
            body = f"{_scalar_text(magnitude)}*{'*'.join(factors)}"
        parts.append((sign, body))

    text = ('-' if parts[0][0] == '-' else '') + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


def poly_degree(poly: PolyElement) -> int:
    return max((sum(m) for m in poly.itermonoms()), default=0)


@dataclass(frozen=True)
class QuadraticRule:
    """w^2 -> linear*w + constant"""
    lead: str
    linear: PolyElement
    constant: PolyElement


@dataclass(frozen=True)
class ConstraintContext:
    ring: PolyRing
    rules: Tuple[QuadraticRule, ...] = ()
    parameters: FrozenSet[str] = frozenset()
    name: str = field(default='free', compare=False)
    _powers: Dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _implicit: Dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        leads = [rule.lead for rule in self.rules]
        if len(set(leads)) != len(leads):
            raise ValueError(f"duplicate leading variable in {leads}")
        for rule in self.rules:
            if rule.lead not in self.variables:
                raise UnknownSymbol(f"rule lead {rule.lead} is not a ring variable")
            for part in (rule.linear, rule.constant):
                if part.ring is not self.ring:
                    raise ContextMismatch("rule polynomial lives in another ring")
                for lead in leads:
                    if any(m[self.index(lead)] for m in part.itermonoms()):
                        raise ValueError(f"rule for {rule.lead} references leading variable {lead}")

    def __hash__(self):
        return hash((self.ring, self.rules, self.parameters))

    # -- variables ---------------------------------------------------------

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(str(s) for s in self.ring.symbols)

    @property
    def leads(self) -> FrozenSet[str]:
        return frozenset(rule.lead for rule in self.rules)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise UnknownSymbol(f"unknown symbol '{name}'") from None

    def gen(self, name: str) -> PolyElement:
        return self.ring.gens[self.index(name)]

    def rule_for(self, name: str) -> Optional[QuadraticRule]:
        for rule in self.rules:
            if rule.lead == name:
                return rule
        return None

    # -- constructors --------------------------------------------------------

    def symbol(self, name: str) -> 'RatExpr':
        return RatExpr(self.gen(name), self.ring.one, self)

    def const(self, value: Number) -> 'RatExpr':
        return RatExpr(self.ring.ground_new(to_scalar(value)), self.ring.one, self)

    def poly(self, poly: PolyElement) -> 'RatExpr':
        return RatExpr(poly, self.ring.one, self)

    @property
    def zero(self) -> 'RatExpr':
        return RatExpr(self.ring.zero, self.ring.one, self, normalized=True)

    @property
    def one(self) -> 'RatExpr':
        return RatExpr(self.ring.one, self.ring.one, self, normalized=True)

    def coerce(self, value: Union['RatExpr', Number, str]) -> 'RatExpr':
        if isinstance(value, RatExpr):
            if value.context != self:
                raise ContextMismatch(f"expression from context '{value.context.name}' used in '{self.name}'")
            return value
        if isinstance(value, str):
            return self.symbol(value)
        return self.const(value)

    def with_rules(self, rules: Sequence[QuadraticRule], name: str,
                   parameters: Optional[FrozenSet[str]] = None) -> 'ConstraintContext':
        return ConstraintContext(self.ring, tuple(rules),
                                 self.parameters if parameters is None else parameters, name)

    # -- reduction -----------------------------------------------------------

    def _power(self, rule: QuadraticRule, exp: int) -> Tuple[PolyElement, PolyElement]:
        """(a, b) with w^exp == a*w + b modulo the rule"""
        cache = self._powers.setdefault(rule.lead, {0: (self.ring.zero, self.ring.one),
                                                    1: (self.ring.one, self.ring.zero)})
        top = max(cache)
        while top < exp:
            a, b = cache[top]
            cache[top + 1] = (a * rule.linear + b, a * rule.constant)
            top += 1
        return cache[exp]

    def _reduce_rule(self, poly: PolyElement, rule: QuadraticRule) -> PolyElement:
        i = self.index(rule.lead)
        kept = {}
        groups: Dict[int, Dict] = {}
        for monom, coeff in poly.items():
            exp = monom[i]
            if exp < 2:
                kept[monom] = coeff
            else:
                base = monom[:i] + (0,) + monom[i + 1:]
                groups.setdefault(exp, {})[base] = coeff

        if not groups:
            return poly

        result = self.ring.from_dict(kept) if kept else self.ring.zero
        w = self.ring.gens[i]
        for exp, terms in groups.items():
            a, b = self._power(rule, exp)
            result += self.ring.from_dict(terms) * (a * w + b)
        return result

    def reduce(self, poly: PolyElement, order: Optional[Sequence[QuadraticRule]] = None) -> PolyElement:
        """Normal form of a polynomial; any rule order gives the same result"""
        for rule in (self.rules if order is None else order):
            poly = self._reduce_rule(poly, rule)
        return poly

    def split(self, poly: PolyElement, lead: str) -> Tuple[PolyElement, PolyElement]:
        """(A, B) with poly == A + B*w for poly of degree <= 1 in w"""
        i = self.index(lead)
        low, high = {}, {}
        for monom, coeff in poly.items():
            if monom[i] == 0:
                low[monom] = coeff
            else:
                high[monom[:i] + (0,) + monom[i + 1:]] = coeff
        return self.ring.from_dict(low), self.ring.from_dict(high)

    def mentions(self, poly: PolyElement, name: str) -> bool:
        i = self.index(name)
        return any(m[i] for m in poly.itermonoms())

    def normalize(self, num: PolyElement, den: PolyElement) -> Tuple[PolyElement, PolyElement]:
        num = self.reduce(num)
        den = self.reduce(den)
        if not den:
            raise DivisionByZero("denominator reduces to zero")

        for rule in self.rules:
            if not self.mentions(den, rule.lead):
                continue
            a, b = self.split(den, rule.lead)
            w = self.gen(rule.lead)
            num = self.reduce(num * (a + b * rule.linear - b * w))
            den = self.reduce(a * a + a * b * rule.linear - b * b * rule.constant)
            if not den:
                raise DivisionByZero("denominator vanishes on the constraint surface")

        if not num:
            return self.ring.zero, self.ring.one

        if den.is_ground:
            return num.quo_ground(den.LC), self.ring.one

        _, num, den = num.cofactors(den)
        lc = den.LC
        return num.quo_ground(lc), den.quo_ground(lc)

    def implicit_derivative(self, lead: str, var: str) -> 'RatExpr':
        """d(lead)/d(var) from w^2 = L*w + R: (L_v*w + R_v) / (2w - L)"""
        key = (lead, var)
        if key not in self._implicit:
            rule = self.rule_for(lead)
            v = self.gen(var)
            w = self.gen(lead)
            top = rule.linear.diff(v) * w + rule.constant.diff(v)
            bottom = 2 * w - rule.linear
            self._implicit[key] = RatExpr(top, bottom, self)
        return self._implicit[key]


class RatExpr:
    """Exact rational function in normal form modulo a constraint context"""

    __slots__ = ('num', 'den', 'context')

    def __init__(self, num: PolyElement, den: PolyElement, context: ConstraintContext,
                 normalized: bool = False):
        if not normalized:
            num, den = context.normalize(num, den)
        object.__setattr__(self, 'num', num)
        object.__setattr__(self, 'den', den)
        object.__setattr__(self, 'context', context)

    def __setattr__(self, name, value):
        raise AttributeError("RatExpr is immutable")

    # -- predicates ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    @property
    def degree(self) -> int:
        return poly_degree(self.num) + poly_degree(self.den)

    def free_symbols(self) -> FrozenSet[str]:
        names = self.context.variables
        used = set()
        for poly in (self.num, self.den):
            for monom in poly.itermonoms():
                used.update(n for n, e in zip(names, monom) if e)
        return frozenset(used)

    def as_fraction(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not a constant")
        if self.is_zero:
            return Fraction(0)
        return scalar_to_fraction(self.num.LC) / scalar_to_fraction(self.den.LC)

    # -- arithmetic ------------------------------------------------------------

    def _other(self, other) -> 'RatExpr':
        if isinstance(other, RatExpr):
            if other.context != self.context:
                raise ContextMismatch(
                    f"contexts differ: '{self.context.name}' vs '{other.context.name}'")
            return other
        if isinstance(other, (int, Fraction)):
            return self.context.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if self.den == other.den:
            return RatExpr(self.num + other.num, self.den, self.context)
        return RatExpr(self.num * other.den + other.num * self.den, self.den * other.den, self.context)

    __radd__ = __add__

    def __neg__(self):
        return RatExpr(-self.num, self.den, self.context, normalized=True)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        if self.is_zero or other.is_zero:
            return self.context.zero
        return RatExpr(self.num * other.num, self.den * other.den, self.context)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        if other.is_zero:
            raise DivisionByZero(f"division by an expression that reduces to 0")
        return RatExpr(self.num * other.den, self.den * other.num, self.context)

    def __rtruediv__(self, other):
        return self.context.coerce(other) / self

    def __pow__(self, exp: int):
        if not isinstance(exp, int):
            return NotImplemented
        if exp < 0:
            return self.context.one / (self ** -exp)
        result = self.context.one
        base = self
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.context.const(other)
        if not isinstance(other, RatExpr):
            return NotImplemented
        return self.context == other.context and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- text ----------------------------------------------------------------

    def __str__(self):
        names = self.context.variables
        num_text = format_poly(self.num, names)
        if self.den == self.context.ring.one:
            return num_text
        if len(self.num) > 1:
            num_text = f"({num_text})"
        den_text = format_poly(self.den, names)
        if len(self.den) > 1 or any(ch in den_text for ch in '*/'):
            den_text = f"({den_text})"
        return f"{num_text}/{den_text}"

    def __repr__(self):
        return f"RatExpr({self})"


def arith(a: RatExpr, b: RatExpr, kind: str) -> RatExpr:
    """Field operation by name: add, sub, mul, div"""
    if a.context != b.context:
        raise ContextMismatch(f"contexts differ: '{a.context.name}' vs '{b.context.name}'")
    if kind == 'add':
        return a + b
    if kind == 'sub':
        return a - b
    if kind == 'mul':
        return a * b
    if kind == 'div':
        return a / b
    raise ValueError(f"unknown arithmetic kind '{kind}'")


def equal_mod(a: RatExpr, b: RatExpr) -> bool:
    """True iff a - b is zero modulo the shared constraint context"""
    if a.context != b.context:
        raise ContextMismatch(f"contexts differ: '{a.context.name}' vs '{b.context.name}'")
    ctx = a.context
    return not ctx.reduce(a.num * b.den - b.num * a.den)


def partial_derivative(f: RatExpr, var: str, allow_parameters: bool = False) -> RatExpr:
    """d f / d var, differentiating solved variables implicitly"""
    ctx = f.context
    ctx.index(var)
    if var in ctx.leads:
        raise UnknownSymbol(f"'{var}' is solved by a constraint rule, not a coordinate")
    if var in ctx.parameters and not allow_parameters:
        raise UnknownSymbol(f"'{var}' is a parameter")

    def total(poly: PolyElement) -> RatExpr:
        result = ctx.poly(poly.diff(ctx.gen(var)))
        for lead in ctx.leads:
            if ctx.mentions(poly, lead):
                dw = ctx.implicit_derivative(lead, var)
                if not dw.is_zero:
                    result = result + ctx.poly(poly.diff(ctx.gen(lead))) * dw
        return result

    dnum = total(f.num)
    if f.den.is_ground:
        return dnum / ctx.poly(f.den)
    dden = total(f.den)
    num, den = ctx.poly(f.num), ctx.poly(f.den)
    return (dnum * den - num * dden) / (den * den)


def substitute(f: RatExpr, mapping: Mapping[str, RatExpr],
               target: Optional[ConstraintContext] = None) -> RatExpr:
    """Ring homomorphism sending variables to expressions in the target context

    Variables absent from the mapping go to the same-named target variable.
    """
    target = target or f.context
    names = f.context.variables
    images: List[Tuple[PolyElement, PolyElement]] = []
    used = f.free_symbols()
    for name in names:
        if name in mapping:
            image = target.coerce(mapping[name])
        elif name in used:
            image = target.symbol(name)
        else:
            image = None
        images.append(None if image is None else (image.num, image.den))

    def evaluate(poly: PolyElement) -> Tuple[PolyElement, PolyElement]:
        powers: Dict[Tuple[int, int], Tuple[PolyElement, PolyElement]] = {}

        def power(i: int, exp: int):
            key = (i, exp)
            if key not in powers:
                n, d = images[i]
                powers[key] = (target.reduce(n ** exp), d ** exp)
            return powers[key]

        acc_n, acc_d = target.ring.zero, target.ring.one
        for monom, coeff in poly.items():
            term_n = target.ring.ground_new(coeff)
            term_d = target.ring.one
            for i, exp in enumerate(monom):
                if exp:
                    n, d = power(i, exp)
                    term_n = target.reduce(term_n * n)
                    if d != 1:
                        term_d = term_d * d
            if term_d == acc_d:
                acc_n = acc_n + term_n
            else:
                acc_n, acc_d = acc_n * term_d + term_n * acc_d, acc_d * term_d
        return acc_n, acc_d

    num_n, num_d = evaluate(f.num)
    den_n, den_d = evaluate(f.den)
    if not target.reduce(den_n):
        raise DivisionByZero("denominator collapses under substitution")
    return RatExpr(num_n * den_d, num_d * den_n, target)


def recontext(f: RatExpr, target: ConstraintContext) -> RatExpr:
    """Same expression read in another context (same ring: re-reduce)"""
    if f.context == target:
        return f
    if f.context.ring is target.ring:
        return RatExpr(f.num, f.den, target)
    return substitute(f, {}, target)


@dataclass
class LinearSolution:
    particular: List[RatExpr]
    kernel: List[List[RatExpr]]

    @property
    def is_unique(self) -> bool:
        return not self.kernel


def linear_solve(matrix: Sequence[Sequence[RatExpr]], rhs: Sequence[RatExpr]) -> LinearSolution:
    """Exact Gauss-Jordan elimination over the fraction field

    Pivots are chosen by lowest total degree. Raises NoSolution when the
    system is inconsistent; an underdetermined system returns one particular
    solution plus a kernel basis.
    """
    if not matrix:
        raise NoSolution("empty system")
    rows = [list(row) + [value] for row, value in zip(matrix, rhs)]
    n_rows, n_cols = len(rows), len(matrix[0])
    ctx = rows[0][0].context
    for row in rows:
        for entry in row:
            if entry.context != ctx:
                raise ContextMismatch("linear system mixes contexts")

    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        candidates = [i for i in range(r, n_rows) if not rows[i][c].is_zero]
        if not candidates:
            continue
        best = min(candidates, key=lambda i: (rows[i][c].degree, i))
        rows[r], rows[best] = rows[best], rows[r]
        inverse = ctx.one / rows[r][c]
        rows[r] = [entry if entry.is_zero else entry * inverse for entry in rows[r]]
        for i in range(n_rows):
            if i == r or rows[i][c].is_zero:
                continue
            factor = rows[i][c]
            rows[i] = [a if b.is_zero else a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1

    for i in range(r, n_rows):
        if not rows[i][n_cols].is_zero:
            raise NoSolution(f"inconsistent row {i}: 0 = {rows[i][n_cols]}")

    particular = [ctx.zero] * n_cols
    for row_index, c in enumerate(pivots):
        particular[c] = rows[row_index][n_cols]

    kernel = []
    for free in (c for c in range(n_cols) if c not in pivots):
        vector = [ctx.zero] * n_cols
        vector[free] = ctx.one
        for row_index, c in enumerate(pivots):
            vector[c] = -rows[row_index][free]
        kernel.append(vector)

    logger.debug("linear_solve: %dx%d system, rank %d", n_rows, n_cols, len(pivots))
    return LinearSolution(particular, kernel)


# -- Minkowski helpers shared by every model ----------------------------------

METRIC = (1, -1, -1, -1)


def minkowski_dot(ctx: ConstraintContext, a: Sequence, b: Sequence) -> RatExpr:
    """g_{mu nu} a^mu b^nu for upper-index component lists"""
    total = ctx.zero
    for sign, x, y in zip(METRIC, a, b):
        total = total + sign * ctx.coerce(x) * ctx.coerce(y)
    return total
