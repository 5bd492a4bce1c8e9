"""
Exterior Calculus
=================
Forms and multivectors on a chart. Exact coefficients. Signs checked twice.

Sign conventions used throughout:
    i_X (f dx^I)  = sum_r (-1)^r X^{i_r} f dx^{I without i_r}      (r from 0)
    i_Lambda      = sum_{a<b} Lambda^{ab} i_{@b} i_{@a}
    [P, Q]_S      = Lie bracket on vectors, [X, f]_S = X(f)
"""

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from engine_errors import ChartMismatch, DegreeTooLow, OperationCancelled, UnknownSymbol
from exact_algebra import (
    ConstraintContext, RatExpr, partial_derivative, recontext, substitute,
)

logger = logging.getLogger(__name__)

Index = Tuple[int, ...]


class CancellationToken:
    """Cooperative cancellation for long contractions"""

    def __init__(self):
        self._event = threading.Event()

    def cancel(self):
        self._event.set()

    @property
    def cancelled(self) -> bool:
        return self._event.is_set()

    def check(self):
        if self._event.is_set():
            raise OperationCancelled("operation cancelled by caller")


def _check(token: Optional[CancellationToken]):
    if token is not None:
        token.check()


@dataclass(frozen=True)
class Chart:
    name: str
    coordinates: Tuple[str, ...]
    context: ConstraintContext
    witness: Tuple[Tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        if len(set(self.coordinates)) != len(self.coordinates):
            raise ValueError(f"chart {self.name}: duplicate coordinates")
        for name in self.coordinates:
            self.context.index(name)
            if name in self.context.leads:
                raise ValueError(f"chart {self.name}: {name} is solved by a constraint")
            if name in self.context.parameters:
                raise ValueError(f"chart {self.name}: {name} is a parameter")

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    @property
    def intrinsic(self) -> bool:
        return bool(self.context.leads)

    def index(self, name: str) -> int:
        try:
            return self.coordinates.index(name)
        except ValueError:
            raise UnknownSymbol(f"'{name}' is not a coordinate of chart {self.name}") from None

    def coordinate(self, name: str) -> RatExpr:
        self.index(name)
        return self.context.symbol(name)

    def witness_point(self) -> Dict[str, Fraction]:
        point = {name: Fraction(i + 1) for i, name in enumerate(self.coordinates)}
        point.update({name: Fraction(1) for name in self.context.parameters})
        point.update(dict(self.witness))
        return point


def sort_sign(indices: Sequence[int]) -> Tuple[int, Index]:
    """Sign of the sorting permutation, 0 when an index repeats"""
    if len(set(indices)) < len(indices):
        return 0, ()
    inversions = sum(
        1 for i in range(len(indices)) for j in range(i + 1, len(indices))
        if indices[i] > indices[j]
    )
    return (-1) ** inversions, tuple(sorted(indices))


class GradedTensor:
    """Antisymmetric tensor: sorted index tuples -> nonzero coefficients"""

    basis_prefix = '?'

    def __init__(self, chart: Chart, degree: int,
                 coeffs: Optional[Mapping[Index, Union[RatExpr, int]]] = None):
        self.chart = chart
        self.degree = degree
        self.coeffs: Dict[Index, RatExpr] = {}
        for indices, coeff in (coeffs or {}).items():
            self._accumulate(indices, coeff)

    def _accumulate(self, indices: Sequence[int], coeff):
        if len(indices) != self.degree:
            raise ValueError(f"index tuple {indices} does not match degree {self.degree}")
        if len(indices) > self.chart.dim:
            return
        sign, key = sort_sign(indices)
        if sign == 0:
            return
        coeff = self.chart.context.coerce(coeff)
        if coeff.is_zero:
            return
        total = self.coeffs.get(key, self.chart.context.zero) + (coeff if sign > 0 else -coeff)
        if total.is_zero:
            self.coeffs.pop(key, None)
        else:
            self.coeffs[key] = total

    @classmethod
    def from_names(cls, chart: Chart, terms: Iterable[Tuple[Sequence[str], object]]):
        """Build from (coordinate names, coefficient) pairs"""
        terms = list(terms)
        degree = len(terms[0][0]) if terms else 0
        tensor = cls(chart, degree)
        for names, coeff in terms:
            tensor._accumulate(tuple(chart.index(n) for n in names), coeff)
        return tensor

    @classmethod
    def zero(cls, chart: Chart, degree: int):
        return cls(chart, degree)

    @classmethod
    def scalar(cls, chart: Chart, value):
        return cls(chart, 0, {(): value})

    # -- access ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def component(self, *names: str) -> RatExpr:
        sign, key = sort_sign([self.chart.index(n) for n in names])
        if sign == 0:
            return self.chart.context.zero
        value = self.coeffs.get(key, self.chart.context.zero)
        return value if sign > 0 else -value

    def value(self) -> RatExpr:
        """Coefficient of a degree-0 tensor"""
        if self.degree != 0:
            raise ValueError(f"degree {self.degree} tensor has no scalar value")
        return self.coeffs.get((), self.chart.context.zero)

    def map_coeffs(self, fn, chart: Optional[Chart] = None):
        result = type(self)(chart or self.chart, self.degree)
        for key, coeff in self.coeffs.items():
            result._accumulate(key, fn(coeff))
        return result

    # -- linear structure --------------------------------------------------

    def _same(self, other: 'GradedTensor'):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.chart != self.chart:
            raise ChartMismatch(f"charts differ: {self.chart.name} vs {other.chart.name}")
        if other.degree != self.degree and not (self.is_zero or other.is_zero):
            raise ValueError(f"degrees differ: {self.degree} vs {other.degree}")

    def __add__(self, other):
        self._same(other)
        if self.is_zero:
            return other
        result = type(self)(self.chart, self.degree, self.coeffs)
        for key, coeff in other.coeffs.items():
            result._accumulate(key, coeff)
        return result

    def __neg__(self):
        return self.map_coeffs(lambda c: -c)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, GradedTensor):
            return NotImplemented
        scalar = self.chart.context.coerce(scalar)
        return self.map_coeffs(lambda c: c * scalar)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GradedTensor) or type(other) is not type(self):
            return NotImplemented
        if self.chart != other.chart:
            return False
        if self.is_zero and other.is_zero:
            return True
        return self.degree == other.degree and self.coeffs == other.coeffs

    __hash__ = None

    # -- text ----------------------------------------------------------------

    def _basis_text(self, key: Index) -> str:
        names = [self.chart.coordinates[i] for i in key]
        return '/\\'.join(self.basis_prefix.format(n) for n in names)

    def __str__(self):
        if self.is_zero:
            return '0'
        parts = []
        for key in sorted(self.coeffs):
            coeff = self.coeffs[key]
            text = str(coeff)
            if not key:
                parts.append(text)
                continue
            basis = self._basis_text(key)
            if text == '1':
                parts.append(basis)
            elif text == '-1':
                parts.append(f"-{basis}")
            elif coeff.den.is_ground and len(coeff.num) == 1:
                parts.append(f"{text}*{basis}")
            else:
                parts.append(f"({text})*{basis}")
        text = parts[0]
        for part in parts[1:]:
            text += f" - {part[1:]}" if part.startswith('-') else f" + {part}"
        return text

    def __repr__(self):
        return f"{type(self).__name__}[{self.degree}]({self})"


class DifferentialForm(GradedTensor):
    basis_prefix = 'd({})'


class MultivectorField(GradedTensor):
    basis_prefix = '@{}'


@dataclass(frozen=True)
class SmoothMap:
    """Map source -> target given by one expression per target variable"""
    source: Chart
    target: Chart
    components: Tuple[Tuple[str, RatExpr], ...]

    @classmethod
    def build(cls, source: Chart, target: Chart, components: Mapping[str, object]) -> 'SmoothMap':
        ctx = source.context
        images = {name: ctx.coerce(value) for name, value in components.items()}
        for name in target.coordinates:
            if name not in images:
                raise UnknownSymbol(f"map {source.name}->{target.name} misses component {name}")
        smooth_map = cls(source, target, tuple(images.items()))
        smooth_map._check_constraints()
        return smooth_map

    @property
    def images(self) -> Dict[str, RatExpr]:
        return dict(self.components)

    def _check_constraints(self):
        target_ctx = self.target.context
        images = self.images
        for rule in target_ctx.rules:
            if rule.lead not in images:
                continue
            w = images[rule.lead]
            lin = substitute(target_ctx.poly(rule.linear), images, self.source.context)
            const = substitute(target_ctx.poly(rule.constant), images, self.source.context)
            if not (w * w - lin * w - const).is_zero:
                raise ChartMismatch(
                    f"map {self.source.name}->{self.target.name} leaves the {rule.lead} constraint")

    def apply(self, f: RatExpr) -> RatExpr:
        return substitute(f, self.images, self.source.context)


# -- exterior algebra ---------------------------------------------------------

def _same_chart(a: GradedTensor, b: GradedTensor):
    if a.chart != b.chart:
        raise ChartMismatch(f"charts differ: {a.chart.name} vs {b.chart.name}")


def function_form(chart: Chart, f) -> DifferentialForm:
    return DifferentialForm.scalar(chart, f)


def coordinate_differential(chart: Chart, name: str) -> DifferentialForm:
    return DifferentialForm(chart, 1, {(chart.index(name),): 1})


def coordinate_vector(chart: Chart, name: str) -> MultivectorField:
    return MultivectorField(chart, 1, {(chart.index(name),): 1})


def wedge(a: GradedTensor, b: GradedTensor, token: Optional[CancellationToken] = None):
    """Exterior product of two forms or two multivectors"""
    _same_chart(a, b)
    if type(a) is not type(b):
        raise TypeError("wedge needs two tensors of the same kind")
    degree = a.degree + b.degree
    result = type(a)(a.chart, degree)
    if degree > a.chart.dim:
        return result
    for i, ci in a.coeffs.items():
        _check(token)
        for j, cj in b.coeffs.items():
            if set(i) & set(j):
                continue
            result._accumulate(i + j, ci * cj)
    return result


def wedge_all(tensors: Sequence[GradedTensor], token: Optional[CancellationToken] = None):
    result = tensors[0]
    for tensor in tensors[1:]:
        result = wedge(result, tensor, token)
    return result


def exterior_derivative(form: DifferentialForm,
                        token: Optional[CancellationToken] = None) -> DifferentialForm:
    chart = form.chart
    result = DifferentialForm(chart, form.degree + 1)
    for key, coeff in form.coeffs.items():
        _check(token)
        for j, name in enumerate(chart.coordinates):
            if j in key:
                continue
            derivative = partial_derivative(coeff, name)
            if not derivative.is_zero:
                result._accumulate((j,) + key, derivative)
    return result


def differential(chart: Chart, f) -> DifferentialForm:
    return exterior_derivative(function_form(chart, f))


def _remove(key: Index, index: int) -> Optional[Tuple[int, Index]]:
    """Left contraction sign and remainder for removing index from key"""
    if index not in key:
        return None
    r = key.index(index)
    return (-1) ** r, key[:r] + key[r + 1:]


def interior_vector(vector: MultivectorField, form: DifferentialForm,
                    token: Optional[CancellationToken] = None) -> DifferentialForm:
    _same_chart(vector, form)
    if vector.degree != 1:
        raise ValueError("interior_vector needs a vector field")
    if form.degree == 0:
        return DifferentialForm.zero(form.chart, 0)
    result = DifferentialForm(form.chart, form.degree - 1)
    for key, coeff in form.coeffs.items():
        _check(token)
        for (a,), xa in vector.coeffs.items():
            removed = _remove(key, a)
            if removed is None:
                continue
            sign, rest = removed
            result._accumulate(rest, coeff * xa if sign > 0 else -(coeff * xa))
    return result


def interior_bivector(bivector: MultivectorField, form: DifferentialForm,
                      token: Optional[CancellationToken] = None) -> DifferentialForm:
    _same_chart(bivector, form)
    if bivector.degree != 2:
        raise ValueError("interior_bivector needs a bivector field")
    if form.degree < 2:
        raise DegreeTooLow(f"cannot contract a bivector into a {form.degree}-form")
    result = DifferentialForm(form.chart, form.degree - 2)
    for key, coeff in form.coeffs.items():
        _check(token)
        for (a, b), lab in bivector.coeffs.items():
            first = _remove(key, a)
            if first is None:
                continue
            second = _remove(first[1], b)
            if second is None:
                continue
            sign = first[0] * second[0]
            term = coeff * lab
            result._accumulate(second[1], term if sign > 0 else -term)
    return result


def apply_vector(vector: MultivectorField, f: RatExpr) -> RatExpr:
    """X(f) = X^a d_a f"""
    chart = vector.chart
    total = chart.context.zero
    for (a,), xa in vector.coeffs.items():
        total = total + xa * partial_derivative(f, chart.coordinates[a])
    return total


def pair_bivector(bivector: MultivectorField, alpha: DifferentialForm,
                  beta: DifferentialForm) -> RatExpr:
    """Lambda(alpha, beta) = Lambda^{ab} alpha_a beta_b"""
    _same_chart(bivector, alpha)
    _same_chart(bivector, beta)
    zero = bivector.chart.context.zero
    total = zero
    for (a, b), lab in bivector.coeffs.items():
        aa, ab = alpha.coeffs.get((a,), zero), alpha.coeffs.get((b,), zero)
        ba, bb = beta.coeffs.get((a,), zero), beta.coeffs.get((b,), zero)
        total = total + lab * (aa * bb - ab * ba)
    return total


def _right_remove(key: Index, index: int) -> Optional[Tuple[int, Index]]:
    """Right derivative: removing xi_i from the end side"""
    if index not in key:
        return None
    r = key.index(index)
    return (-1) ** (len(key) - 1 - r), key[:r] + key[r + 1:]


def schouten_bracket(p: MultivectorField, q: MultivectorField,
                     token: Optional[CancellationToken] = None) -> MultivectorField:
    """Schouten-Nijenhuis bracket, component formula over odd coordinates"""
    _same_chart(p, q)
    chart = p.chart
    degree = p.degree + q.degree - 1
    if degree < 0:
        return MultivectorField.zero(chart, 0)
    outer = (-1) ** ((p.degree - 1) * (q.degree - 1))
    result = MultivectorField(chart, degree)
    for ikey, f in p.coeffs.items():
        _check(token)
        for jkey, g in q.coeffs.items():
            for i, name in enumerate(chart.coordinates):
                removed = _right_remove(ikey, i)
                if removed is not None:
                    dg = partial_derivative(g, name)
                    if not dg.is_zero:
                        sign, rest = removed
                        term = f * dg
                        result._accumulate(rest + jkey, term if sign * outer > 0 else -term)
                removed = _right_remove(jkey, i)
                if removed is not None:
                    df = partial_derivative(f, name)
                    if not df.is_zero:
                        sign, rest = removed
                        term = g * df
                        # the two outer factors cancel on this half
                        result._accumulate(rest + ikey, -term if sign > 0 else term)
    return result


def _lie_bracket(x: MultivectorField, y: MultivectorField) -> MultivectorField:
    """[X, Y]^k = X(Y^k) - Y(X^k)"""
    chart = x.chart
    zero = chart.context.zero
    result = MultivectorField(chart, 1)
    for k in range(chart.dim):
        result._accumulate((k,), apply_vector(x, y.coeffs.get((k,), zero))
                           - apply_vector(y, x.coeffs.get((k,), zero)))
    return result


def _split_head(tensor: MultivectorField):
    """h @a^@b^... -> (h @a, @b^...) per stored component"""
    for key, coeff in tensor.coeffs.items():
        yield (MultivectorField(tensor.chart, 1, {key[:1]: coeff}),
               MultivectorField(tensor.chart, tensor.degree - 1, {key[1:]: 1}))


def _graded_leibniz(p: MultivectorField, q: MultivectorField,
                    token: Optional[CancellationToken]) -> MultivectorField:
    """Bracket with [X,f] = X(f), graded antisymmetry and
    [P, Q^R] = [P,Q]^R + (-1)^((p-1)q) Q^[P,R]
    """
    chart = p.chart
    degree = p.degree + q.degree - 1
    if degree < 0:
        return MultivectorField.zero(chart, 0)
    if p.is_zero or q.is_zero:
        return MultivectorField(chart, degree)
    if p.degree == 1 and q.degree == 1:
        return _lie_bracket(p, q)
    if p.degree == 1 and q.degree == 0:
        return MultivectorField.scalar(chart, apply_vector(p, q.value()))
    if p.degree == 0 and q.degree == 1:
        return MultivectorField.scalar(chart, -apply_vector(q, p.value()))
    if q.degree == 0:
        flipped = _graded_leibniz(q, p, token)
        return flipped if p.degree % 2 == 0 else -flipped

    result = MultivectorField(chart, degree)
    for head, tail in _split_head(q):
        _check(token)
        if p.degree >= 2:
            first = -_graded_leibniz(head, p, token)
        else:
            first = _graded_leibniz(p, head, token)
        result = result + wedge(first, tail, token)
        if tail.degree > 0:
            second = wedge(head, _graded_leibniz(p, tail, token), token)
            result = result + (second if (p.degree - 1) % 2 == 0 else -second)
    return result


def schouten_bracket_recursive(p: MultivectorField, q: MultivectorField,
                               token: Optional[CancellationToken] = None) -> MultivectorField:
    """Schouten-Nijenhuis bracket by graded Leibniz expansion

    Expands down to vector fields and functions; agrees with the component
    formula of schouten_bracket and serves as its cross-check.
    """
    _same_chart(p, q)
    result = _graded_leibniz(p, q, token)
    if (p.degree - 1) * (q.degree - 1) % 2:
        return -result
    return result


def lie_derivative(vector: MultivectorField, tensor: GradedTensor,
                   token: Optional[CancellationToken] = None) -> GradedTensor:
    """Cartan formula on forms, Schouten bracket on multivectors"""
    _same_chart(vector, tensor)
    if isinstance(tensor, MultivectorField):
        return schouten_bracket(vector, tensor, token)
    first = interior_vector(vector, exterior_derivative(tensor, token), token)
    if tensor.degree == 0:
        return first
    return first + exterior_derivative(interior_vector(vector, tensor, token), token)


def pullback(smooth_map: SmoothMap, form: DifferentialForm,
             token: Optional[CancellationToken] = None) -> DifferentialForm:
    if form.chart != smooth_map.target:
        raise ChartMismatch(f"form lives on {form.chart.name}, map targets {smooth_map.target.name}")
    source = smooth_map.source
    images = smooth_map.images
    differentials: Dict[int, DifferentialForm] = {}
    result = DifferentialForm(source, form.degree)
    for key, coeff in form.coeffs.items():
        _check(token)
        term = function_form(source, smooth_map.apply(coeff))
        for index in key:
            if index not in differentials:
                name = form.chart.coordinates[index]
                differentials[index] = differential(source, images[name])
            term = wedge(term, differentials[index])
        result = result + term
    return result


def restrict(tensor: MultivectorField, target: Chart) -> MultivectorField:
    """Ambient multivector -> intrinsic chart on the same ring

    The tensor must be tangent to every constraint of the target: the
    contraction with d(w^2 - L w - R) vanishes modulo the target context.
    """
    source = tensor.chart
    if source.context.ring is not target.context.ring:
        raise ChartMismatch(f"{source.name} and {target.name} use different rings")

    if tensor.degree > 0:
        for rule in target.context.rules:
            if rule.lead not in source.coordinates:
                continue
            ctx = source.context
            w = ctx.symbol(rule.lead)
            constraint = w * w - ctx.poly(rule.linear) * w - ctx.poly(rule.constant)
            normal = differential(source, constraint)
            contraction = contract_form(tensor, normal)
            for residual in contraction.coeffs.values():
                if not recontext(residual, target.context).is_zero:
                    raise ChartMismatch(f"tensor is not tangent to the {rule.lead} constraint")

    result = MultivectorField(target, tensor.degree)
    for key, coeff in tensor.coeffs.items():
        names = [source.coordinates[i] for i in key]
        if any(n not in target.coordinates for n in names):
            continue
        result._accumulate(tuple(target.index(n) for n in names), recontext(coeff, target.context))
    return result


def contract_form(tensor: MultivectorField, one_form: DifferentialForm) -> MultivectorField:
    """i_alpha T for a one-form alpha, contracting the first slot"""
    _same_chart(tensor, one_form)
    result = MultivectorField(tensor.chart, max(tensor.degree - 1, 0))
    if tensor.degree == 0:
        return result
    for key, coeff in tensor.coeffs.items():
        for (a,), alpha_a in one_form.coeffs.items():
            removed = _remove(key, a)
            if removed is None:
                continue
            sign, rest = removed
            term = coeff * alpha_a
            result._accumulate(rest, term if sign > 0 else -term)
    return result


def change_chart(tensor: GradedTensor, target: Chart) -> GradedTensor:
    """Same components, read on a chart with the same coordinates"""
    if tuple(tensor.chart.coordinates) != tuple(target.coordinates):
        raise ChartMismatch(f"{tensor.chart.name} and {target.name} have different coordinates")
    return tensor.map_coeffs(lambda c: recontext(c, target.context), chart=target)


def top_coefficient(form: DifferentialForm) -> RatExpr:
    chart = form.chart
    if form.degree != chart.dim:
        raise ValueError(f"degree {form.degree} is not top degree {chart.dim}")
    return form.coeffs.get(tuple(range(chart.dim)), chart.context.zero)


def vanishes_at(f: RatExpr, point: Mapping[str, Fraction]) -> bool:
    """Exact test of f at a rational point; solved variables may stay algebraic

    Solved variables are eliminated one at a time: A + B w vanishes at a root
    of w^2 = L w + R exactly when A^2 + A B L - B^2 R does.
    """
    ctx = f.context
    values = {name: ctx.const(value) for name, value in point.items()
              if name in ctx.variables and name not in ctx.leads}
    g = substitute(f, values, ctx)
    for lead in sorted(ctx.leads):
        if g.is_zero:
            return True
        if lead not in g.free_symbols():
            continue
        rule = ctx.rule_for(lead)
        a, b = (ctx.poly(part) for part in ctx.split(g.num, lead))
        lin = substitute(ctx.poly(rule.linear), values, ctx)
        const = substitute(ctx.poly(rule.constant), values, ctx)
        g = substitute(a * a + a * b * lin - b * b * const, values, ctx)
    if g.is_zero:
        return True
    if not g.is_constant:
        loose = ', '.join(sorted(g.free_symbols()))
        raise ChartMismatch(f"point leaves {loose} unresolved")
    return False


def is_nonvanishing_top(form: DifferentialForm) -> bool:
    coefficient = top_coefficient(form)
    if coefficient.is_zero:
        return False
    return not vanishes_at(coefficient, form.chart.witness_point())
