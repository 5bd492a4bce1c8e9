"""
Geodesic Peierls
================
Straight time-like lines, their Jacobi fields, and the bracket of
functionals localized at finitely many parameter values.

Observables are polynomials in x0..x3; evaluating one on a geodesic sends
x^mu to x^mu + s k^mu, where x^mu on the right is the base point.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from engine_errors import UsageError
from exact_algebra import (
    METRIC, ConstraintContext, QuadraticRule, RatExpr, make_ring, minkowski_dot,
    partial_derivative, substitute,
)
from expression_parser import parse_expression

logger = logging.getLogger(__name__)

INDICES = range(4)

GEODESIC_VARS = (('s', 's1', 's2') + tuple(f"x{i}" for i in INDICES) + tuple(f"k{i}" for i in INDICES)
                 + tuple(f"a{i}" for i in INDICES) + tuple(f"b{i}" for i in INDICES) + ('c1', 'c2'))

Vector = List[RatExpr]
Matrix = List[List[RatExpr]]


def geodesic_context() -> ConstraintContext:
    """k0^2 -> 1 + k1^2 + k2^2 + k3^2"""
    ring = make_ring(GEODESIC_VARS)
    constant = ring.one
    for i in (1, 2, 3):
        constant = constant + ring.gens[GEODESIC_VARS.index(f"k{i}")] ** 2
    free = ConstraintContext(ring, (), frozenset(), 'geodesics')
    return free.with_rules([QuadraticRule('k0', ring.zero, constant)], 'proper-time')


@dataclass
class Geodesic:
    context: ConstraintContext
    base: Vector
    velocity: Vector

    @classmethod
    def symbolic(cls, context: Optional[ConstraintContext] = None) -> 'Geodesic':
        ctx = context or geodesic_context()
        return cls(ctx, [ctx.symbol(f"x{mu}") for mu in INDICES],
                   [ctx.symbol(f"k{mu}") for mu in INDICES])

    @classmethod
    def numeric(cls, base: Sequence[Fraction], velocity: Sequence[Fraction],
                context: Optional[ConstraintContext] = None) -> 'Geodesic':
        ctx = context or geodesic_context()
        norm = sum(METRIC[mu] * Fraction(velocity[mu]) ** 2 for mu in INDICES)
        if norm != 1:
            raise UsageError(f"velocity {list(map(str, velocity))} has k.k = {norm}, expected 1")
        return cls(ctx, [ctx.const(Fraction(b)) for b in base],
                   [ctx.const(Fraction(k)) for k in velocity])

    def point(self, s) -> Vector:
        s = self.context.coerce(s)
        return [b + s * k for b, k in zip(self.base, self.velocity)]

    def lower_velocity(self) -> Vector:
        return [k * METRIC[mu] for mu, k in enumerate(self.velocity)]

    def dot(self, a: Sequence, b: Sequence) -> RatExpr:
        return minkowski_dot(self.context, a, b)

    @property
    def parameter(self) -> RatExpr:
        return self.context.symbol('s')


@dataclass
class JacobiField:
    """J(s) = J0 + s J0'"""
    initial: Vector
    rate: Vector

    def at(self, s: RatExpr) -> Vector:
        return [j + s * r for j, r in zip(self.initial, self.rate)]

    @classmethod
    def along(cls, geodesic: Geodesic, a, b) -> 'JacobiField':
        """(a s + b) k"""
        ctx = geodesic.context
        return cls([ctx.coerce(b) * k for k in geodesic.velocity],
                   [ctx.coerce(a) * k for k in geodesic.velocity])


def projector(geodesic: Geodesic, placement: str = 'lower') -> Matrix:
    """P = g - k k with both indices lower, upper, or mixed (P^mu_nu)"""
    ctx = geodesic.context
    k_up = geodesic.velocity
    k_lo = geodesic.lower_velocity()
    rows = []
    for mu in INDICES:
        row = []
        for nu in INDICES:
            if placement == 'lower':
                value = (METRIC[mu] if mu == nu else 0) - k_lo[mu] * k_lo[nu]
            elif placement == 'upper':
                value = (METRIC[mu] if mu == nu else 0) - k_up[mu] * k_up[nu]
            elif placement == 'mixed':
                value = (1 if mu == nu else 0) - k_up[mu] * k_lo[nu]
            else:
                raise ValueError(f"unknown placement '{placement}'")
            row.append(ctx.coerce(value))
        rows.append(row)
    return rows


def mat_vec(matrix: Matrix, vector: Sequence[RatExpr]) -> Vector:
    return [sum((m * v for m, v in zip(row, vector)), row[0].context.zero) for row in matrix]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    ctx = a[0][0].context
    return [[sum((a[i][k] * b[k][j] for k in INDICES), ctx.zero) for j in INDICES] for i in INDICES]


def jacobi_operator_apply(geodesic: Geodesic, variation: Sequence[RatExpr]) -> Vector:
    """P_{mu nu} d^2/ds^2 variation^nu (L = 1 in proper time)"""
    second = [partial_derivative(partial_derivative(v, 's'), 's') for v in variation]
    return mat_vec(projector(geodesic, 'lower'), second)


def decompose_jacobi_field(geodesic: Geodesic, jacobi: JacobiField) -> Tuple[JacobiField, RatExpr, RatExpr]:
    """J = J_perp + (a s + b) k with a = <J0', k>, b = <J0, k>"""
    k = geodesic.velocity
    a = geodesic.dot(jacobi.rate, k)
    b = geodesic.dot(jacobi.initial, k)
    perp = JacobiField([j - b * kk for j, kk in zip(jacobi.initial, k)],
                       [r - a * kk for r, kk in zip(jacobi.rate, k)])
    return perp, a, b


def theta_eval(geodesic: Geodesic, jacobi: JacobiField) -> RatExpr:
    """<k, J(s)>"""
    return geodesic.dot(geodesic.velocity, jacobi.at(geodesic.parameter))


def omega_eval(geodesic: Geodesic, first: JacobiField, second: JacobiField) -> RatExpr:
    """J1 P J2' - J1' P J2, both sides evaluated at the running parameter"""
    s = geodesic.parameter
    lower = projector(geodesic, 'lower')
    j1, j2 = first.at(s), second.at(s)
    d1 = [partial_derivative(c, 's') for c in j1]
    d2 = [partial_derivative(c, 's') for c in j2]
    left = sum((a * b for a, b in zip(j1, mat_vec(lower, d2))), geodesic.context.zero)
    right = sum((a * b for a, b in zip(d1, mat_vec(lower, j2))), geodesic.context.zero)
    return left - right


# -- functionals -----------------------------------------------------------------------

@dataclass
class DeltaFunctional:
    """A[gamma] = sum_i F_i(gamma(s_i))"""
    atoms: List[Tuple[RatExpr, RatExpr]] = field(default_factory=list)

    def value(self, geodesic: Geodesic) -> RatExpr:
        total = geodesic.context.zero
        for observable, s in self.atoms:
            total = total + evaluate_on(geodesic, observable, s)
        return total

    def gradients(self, geodesic: Geodesic) -> List[Tuple[Vector, RatExpr]]:
        """(dF_i/dx^mu at gamma(s_i), s_i) per atom"""
        grads = []
        for observable, s in self.atoms:
            partials = [partial_derivative(observable, f"x{mu}") for mu in INDICES]
            grads.append(([evaluate_on(geodesic, p, s) for p in partials], s))
        return grads

    def __str__(self):
        return ' + '.join(f"{f} @ s={s}" for f, s in self.atoms) or '0'


def evaluate_on(geodesic: Geodesic, observable: RatExpr, s) -> RatExpr:
    point = geodesic.point(s)
    return substitute(observable, {f"x{mu}": point[mu] for mu in INDICES}, geodesic.context)


@dataclass
class GreenKernel:
    """G^{mu nu}(s, s') = P^{mu nu} (s - s') + (c1 (s - s') + c2) k^mu k^nu"""
    geodesic: Geodesic
    gauge_linear: RatExpr = None
    gauge_constant: RatExpr = None

    def __post_init__(self):
        ctx = self.geodesic.context
        self.gauge_linear = ctx.coerce(self.gauge_linear if self.gauge_linear is not None else 0)
        self.gauge_constant = ctx.coerce(self.gauge_constant if self.gauge_constant is not None else 0)
        self._upper = projector(self.geodesic, 'upper')

    def entry(self, mu: int, nu: int, s, s_prime) -> RatExpr:
        ctx = self.geodesic.context
        delta = ctx.coerce(s) - ctx.coerce(s_prime)
        k = self.geodesic.velocity
        gauge = (self.gauge_linear * delta + self.gauge_constant) * k[mu] * k[nu]
        return self._upper[mu][nu] * delta + gauge


def peierls_bracket(geodesic: Geodesic, first: DeltaFunctional, second: DeltaFunctional,
                    kernel: Optional[GreenKernel] = None) -> RatExpr:
    """Green-function part plus A[g] Gamma(B) - B[g] Gamma(A)"""
    kernel = kernel or GreenKernel(geodesic)
    ctx = geodesic.context
    grads_a = first.gradients(geodesic)
    grads_b = second.gradients(geodesic)
    total = ctx.zero
    for da, sa in grads_a:
        for db, sb in grads_b:
            for mu in INDICES:
                if da[mu].is_zero:
                    continue
                for nu in INDICES:
                    if db[nu].is_zero:
                        continue
                    total = total + da[mu] * kernel.entry(mu, nu, sa, sb) * db[nu]
    k = geodesic.velocity
    flow_a = sum((k[mu] * da[mu] for da, _ in grads_a for mu in INDICES), ctx.zero)
    flow_b = sum((k[mu] * db[mu] for db, _ in grads_b for mu in INDICES), ctx.zero)
    return total + first.value(geodesic) * flow_b - second.value(geodesic) * flow_a


def reparam_invariant(functional: DeltaFunctional, geodesic: Geodesic) -> bool:
    """sum_i k^mu dF_i/dx^mu (gamma(s_i)) == 0"""
    k = geodesic.velocity
    flow = geodesic.context.zero
    for grad, _ in functional.gradients(geodesic):
        for mu in INDICES:
            flow = flow + k[mu] * grad[mu]
    return flow.is_zero


# -- retarded and advanced kernels -------------------------------------------------------

@dataclass
class PiecewisePolynomial:
    """left(s) for s < point, right(s) for s > point"""
    point: RatExpr
    left: RatExpr
    right: RatExpr

    def jump(self) -> RatExpr:
        s_map = {'s': self.point}
        ctx = self.point.context
        return substitute(self.right, s_map, ctx) - substitute(self.left, s_map, ctx)

    def derivative(self) -> 'PiecewisePolynomial':
        return PiecewisePolynomial(self.point, partial_derivative(self.left, 's'),
                                   partial_derivative(self.right, 's'))

    def second_derivative(self) -> Tuple['PiecewisePolynomial', RatExpr, RatExpr]:
        """(regular part, delta coefficient, delta-prime coefficient)"""
        first = self.derivative()
        return first.derivative(), first.jump(), self.jump()


def retarded_kernel(geodesic: Geodesic, source) -> List[List[PiecewisePolynomial]]:
    """P^{mu nu} (s - s0) theta(s - s0)"""
    ctx = geodesic.context
    s0 = ctx.coerce(source)
    delta = geodesic.parameter - s0
    upper = projector(geodesic, 'upper')
    return [[PiecewisePolynomial(s0, ctx.zero, upper[mu][nu] * delta) for nu in INDICES] for mu in INDICES]


def advanced_kernel(geodesic: Geodesic, source) -> List[List[PiecewisePolynomial]]:
    """-P^{mu nu} (s - s0) theta(s0 - s)"""
    ctx = geodesic.context
    s0 = ctx.coerce(source)
    delta = geodesic.parameter - s0
    upper = projector(geodesic, 'upper')
    return [[PiecewisePolynomial(s0, -upper[mu][nu] * delta, ctx.zero) for nu in INDICES] for mu in INDICES]


def kernel_source(geodesic: Geodesic, kernel: List[List[PiecewisePolynomial]]) -> Tuple[Matrix, bool]:
    """Jacobi operator applied to a kernel: delta coefficient P_lower . [G'] and
    whether the regular and delta-prime parts vanish"""
    lower = projector(geodesic, 'lower')
    regular_zero = True
    deltas: Matrix = []
    for row in kernel:
        delta_row = []
        for entry in row:
            regular, delta, delta_prime = entry.second_derivative()
            regular_zero &= regular.left.is_zero and regular.right.is_zero and delta_prime.is_zero
            delta_row.append(delta)
        deltas.append(delta_row)
    return mat_mul(lower, deltas), regular_zero


# -- text specs ------------------------------------------------------------------------

GEODESIC_RE = re.compile(r"^\s*x0?\s*=\s*\[([^\]]*)\]\s*[,;]\s*k\s*=\s*\[([^\]]*)\]\s*$")
ATOM_RE = re.compile(r"^(.*)@\s*s\s*=\s*(.+)$")


def parse_geodesic(text: str, context: Optional[ConstraintContext] = None) -> Geodesic:
    """'symbolic' or 'x0=[a,b,c,d],k=[a,b,c,d]' with exact rationals"""
    if text.strip() == 'symbolic':
        return Geodesic.symbolic(context)
    match = GEODESIC_RE.match(text)
    if not match:
        raise UsageError(f"cannot read geodesic '{text}'; use symbolic or x0=[...],k=[...]")
    try:
        base = [Fraction(part.strip()) for part in match.group(1).split(',')]
        velocity = [Fraction(part.strip()) for part in match.group(2).split(',')]
    except ValueError as e:
        raise UsageError(f"geodesic components must be rationals: {e}") from e
    if len(base) != 4 or len(velocity) != 4:
        raise UsageError("geodesic needs four base and four velocity components")
    return Geodesic.numeric(base, velocity, context)


def parse_functional(text: str, context: ConstraintContext) -> DeltaFunctional:
    """'F @ s=value' atoms separated by ';'"""
    atoms = []
    for chunk in text.split(';'):
        if not chunk.strip():
            continue
        match = ATOM_RE.match(chunk.strip())
        if not match:
            raise UsageError(f"functional atom '{chunk.strip()}' needs the form 'F @ s=value'")
        observable = parse_expression(match.group(1), context)
        extra = observable.free_symbols() - {f"x{mu}" for mu in INDICES}
        if extra:
            raise UsageError(f"observable {observable} may only use x0..x3, found {sorted(extra)}")
        atoms.append((observable, parse_expression(match.group(2), context)))
    return DeltaFunctional(atoms)
