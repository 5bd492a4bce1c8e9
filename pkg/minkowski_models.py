"""
Minkowski Models
================
Mass shell. Two-point space. Tangent bundle. Poincare closure on each.

Signature (+,-,-,-). Indices are 0..3; lowering is multiplication by
METRIC[mu]. The mass is a parameter `m` unless a rational is supplied.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from engine_errors import ConstructionError, NoSolution, NotCasimirFunction
from exact_algebra import (
    METRIC, ConstraintContext, QuadraticRule, RatExpr, linear_solve, make_ring,
    minkowski_dot, partial_derivative, recontext, scalar_to_fraction, substitute,
)
from exterior_calculus import (
    Chart, DifferentialForm, GradedTensor, MultivectorField, SmoothMap, apply_vector,
    contract_form, differential, exterior_derivative, interior_vector, lie_derivative,
    pullback, restrict,
)
from contact_jacobi import (
    BracketTable, ContactModel, JacobiPair, bracket_table, extract_jacobi_pair,
    is_poisson_element, jacobi_bracket, verify_contact, hamiltonian_vector_field,
)
from verification_report import FAIL, MEASURED, CheckRecord, passed

logger = logging.getLogger(__name__)

INDICES = range(4)
PAIRS = [(r, s) for r in INDICES for s in INDICES if r < s]

MASS_SHELL_VARS = tuple(f"x{i}" for i in INDICES) + tuple(f"p{i}" for i in INDICES) + ('m',)
TWO_POINT_VARS = tuple(f"x{i}" for i in INDICES) + tuple(f"y{i}" for i in INDICES) + ('m',)
LAGRANGIAN_VARS = tuple(f"x{i}" for i in INDICES) + tuple(f"v{i}" for i in INDICES) + ('L',)

MODEL_NAMES = ('mass-shell', 'two-point', 'lagrangian')


def mass_squared(ctx: ConstraintContext, mass: Optional[Fraction]) -> RatExpr:
    if mass is None:
        return ctx.symbol('m') * ctx.symbol('m')
    return ctx.const(Fraction(mass) ** 2)


def vectors(chart: Chart, terms: Sequence[Tuple[str, RatExpr]]) -> MultivectorField:
    return MultivectorField.from_names(chart, [((name,), c) for name, c in terms])


def ambient_bivector(chart: Chart, first: str, second: str, u: Sequence[RatExpr],
                     msq: RatExpr) -> MultivectorField:
    """(g^{mu nu} - u^mu u^nu / m^2) @first_mu /\\ @second_nu"""
    terms = []
    for mu in INDICES:
        for nu in INDICES:
            coeff = -u[mu] * u[nu] / msq
            if mu == nu:
                coeff = coeff + METRIC[mu]
            terms.append(((f"{first}{mu}", f"{second}{nu}"), coeff))
    return MultivectorField.from_names(chart, terms)


def _require(holds: bool, what: str):
    if not holds:
        raise ConstructionError(what)


# -- Poincare generators ----------------------------------------------------------

def lorentz_field(chart: Chart, prefixes: Sequence[str], rho: int, sigma: int) -> MultivectorField:
    """sum over prefixes q of q_rho @q_sigma - q_sigma @q_rho (lower family)"""
    terms = []
    for q in prefixes:
        lo_r = chart.context.symbol(f"{q}{rho}") * METRIC[rho]
        lo_s = chart.context.symbol(f"{q}{sigma}") * METRIC[sigma]
        terms.append((f"{q}{sigma}", lo_r))
        terms.append((f"{q}{rho}", -lo_s))
    return vectors(chart, terms)


def translation_field(chart: Chart, prefixes: Sequence[str], mu: int) -> MultivectorField:
    return vectors(chart, [(f"{q}{mu}", chart.context.one) for q in prefixes])


def poincare_fields(ambient: Chart, chart: Chart, lorentz_prefixes: Sequence[str],
                    translation_prefixes: Sequence[str]) -> List[Tuple[str, MultivectorField]]:
    fields = []
    for rho, sigma in PAIRS:
        field = lorentz_field(ambient, lorentz_prefixes, rho, sigma)
        fields.append((f"X{rho}{sigma}", restrict(field, chart)))
    for mu in INDICES:
        field = translation_field(ambient, translation_prefixes, mu)
        fields.append((f"X{mu}", restrict(field, chart)))
    return fields


def poincare_invariance_check(chart_name: str, fields: Sequence[Tuple[str, MultivectorField]],
                              tensors: Sequence[Tuple[str, GradedTensor]]) -> List[CheckRecord]:
    """L_X T == 0 for every generator field and tensor"""
    constrained = bool(fields and fields[0][1].chart.context.rules)
    records = []
    for label, field in fields:
        for name, tensor in tensors:
            residual = lie_derivative(field, tensor)
            records.append(CheckRecord(
                f"{chart_name}/poincare/{label}/{name}", f"L_X {name} = 0",
                passed(residual.is_zero, constrained),
                residual=None if residual.is_zero else str(residual)))
    return records


def _monomial_rows(values: Sequence[RatExpr]) -> List[Tuple[int, ...]]:
    monomials = set()
    for value in values:
        monomials.update(value.num.itermonoms())
    return sorted(monomials)


def express_in_basis(value: RatExpr, basis: Sequence[RatExpr]) -> Optional[List[Fraction]]:
    """Rational constants c with value == sum c_k basis_k, or None"""
    ctx = value.context
    if value.is_zero:
        return [Fraction(0)] * len(basis)
    if any(b.den != ctx.ring.one for b in basis) or value.den != ctx.ring.one:
        return None
    rows = _monomial_rows(list(basis) + [value])
    columns = [dict(b.num.items()) for b in basis]
    target = dict(value.num.items())

    def entry(coeffs, monom):
        return ctx.const(scalar_to_fraction(coeffs[monom])) if monom in coeffs else ctx.zero

    matrix = [[entry(column, m) for column in columns] for m in rows]
    rhs = [entry(target, m) for m in rows]
    try:
        solution = linear_solve(matrix, rhs)
    except NoSolution:
        return None
    return [c.as_fraction() for c in solution.particular]


def structure_constants_check(name: str, generators: Sequence[Tuple[str, RatExpr]],
                              pair: JacobiPair) -> List[CheckRecord]:
    """Closure of the ten generators under the bracket, constants measured"""
    labels = [label for label, _ in generators]
    funcs = [f for _, f in generators]
    lorentz = [i for i, label in enumerate(labels) if label.startswith('M')]
    trans = [i for i, label in enumerate(labels) if label.startswith('P')]
    constrained = bool(pair.chart.context.rules)
    constants: Dict[Tuple[int, int], List[Fraction]] = {}
    closure = True
    shape = True
    for i in range(len(funcs)):
        for j in range(len(funcs)):
            value = jacobi_bracket(pair, funcs[i], funcs[j])
            coeffs = express_in_basis(value, funcs)
            if coeffs is None:
                closure = False
                continue
            constants[(i, j)] = coeffs
            support = {k for k, c in enumerate(coeffs) if c}
            if i in trans and j in trans:
                shape &= not support
            elif (i in trans) != (j in trans):
                shape &= support <= set(trans)
            else:
                shape &= support <= set(lorentz)
    antisymmetric = all(
        constants.get((j, i)) is not None
        and all(a == -b for a, b in zip(c, constants[(j, i)]))
        for (i, j), c in constants.items()
    )
    measured = '; '.join(
        f"[{labels[i]},{labels[j]}] = " + ' + '.join(
            f"{c}*{labels[k]}" for k, c in enumerate(coeffs) if c)
        for (i, j), coeffs in sorted(constants.items())
        if i < j and any(coeffs)
    )
    poisson = all(is_poisson_element(pair, f) for f in funcs)
    return [
        CheckRecord(f"{name}/generators/closure", 'generators close under the bracket',
                    passed(closure and shape, constrained)),
        CheckRecord(f"{name}/generators/antisymmetric", 'c_ij^k = -c_ji^k',
                    passed(closure and antisymmetric, constrained)),
        CheckRecord(f"{name}/generators/constants", 'Poincare structure constants',
                    MEASURED if closure else FAIL, measured=measured or '0'),
        CheckRecord(f"{name}/generators/poisson", 'L_Gamma f = 0 on generators',
                    passed(poisson, constrained)),
    ]


# -- mass shell ---------------------------------------------------------------------

@dataclass
class MassShellModel:
    ambient: Chart
    chart: Chart
    immersion: SmoothMap
    theta0: DifferentialForm
    theta: DifferentialForm
    contact: ContactModel
    pair: JacobiPair
    ambient_pair: JacobiPair
    mass: Optional[Fraction] = None

    name = 'mass-shell'

    @property
    def context(self) -> ConstraintContext:
        return self.chart.context

    def mass_squared(self) -> RatExpr:
        return mass_squared(self.context, self.mass)

    def x(self, mu: int) -> RatExpr:
        return self.context.symbol(f"x{mu}")

    def p(self, mu: int) -> RatExpr:
        return self.context.symbol(f"p{mu}")

    def coordinate_functions(self) -> List[Tuple[str, RatExpr]]:
        return ([(f"x{mu}", self.x(mu)) for mu in INDICES]
                + [(f"p{mu}", self.p(mu)) for mu in INDICES])

    def generators(self) -> List[Tuple[str, RatExpr]]:
        """M^{rho sigma} = x^rho p^sigma - x^sigma p^rho and P^mu = p^mu"""
        gens = [(f"M{r}{s}", self.x(r) * self.p(s) - self.x(s) * self.p(r)) for r, s in PAIRS]
        return gens + [(f"P{mu}", self.p(mu)) for mu in INDICES]

    def poincare_fields(self) -> List[Tuple[str, MultivectorField]]:
        return poincare_fields(self.ambient, self.chart, ('x', 'p'), ('x',))

    def table(self, pair: Optional[JacobiPair] = None) -> BracketTable:
        return bracket_table(pair or self.pair, self.coordinate_functions())


def mass_shell_contexts(mass: Optional[Fraction] = None) -> Tuple[ConstraintContext, ConstraintContext]:
    ring = make_ring(MASS_SHELL_VARS)
    free = ConstraintContext(ring, (), frozenset({'m'}), 'cotangent')
    msq = mass_squared(free, mass)
    constant = msq.num
    for i in (1, 2, 3):
        constant = constant + free.gen(f"p{i}") ** 2
    rule = QuadraticRule('p0', ring.zero, constant)
    return free, free.with_rules([rule], 'mass-shell')


def liouville_form(chart: Chart, momentum: str = 'p') -> DifferentialForm:
    """theta0 = p_mu dx^mu"""
    ctx = chart.context
    return DifferentialForm.from_names(
        chart, [((f"x{mu}",), ctx.symbol(f"{momentum}{mu}") * METRIC[mu]) for mu in INDICES])


def build_mass_shell(mass: Optional[Fraction] = None) -> MassShellModel:
    free, shell = mass_shell_contexts(mass)
    ambient = Chart('T*R4', MASS_SHELL_VARS[:8], free)
    witness = tuple((f"x{mu}", Fraction(0)) for mu in INDICES) + (
        ('p1', Fraction(1)), ('p2', Fraction(2)), ('p3', Fraction(3)))
    chart = Chart('Sigma_m', MASS_SHELL_VARS[:4] + MASS_SHELL_VARS[5:8], shell, witness)
    immersion = SmoothMap.build(chart, ambient, {n: shell.symbol(n) for n in ambient.coordinates})

    theta0 = liouville_form(ambient)
    theta = pullback(immersion, theta0)
    contact = verify_contact(chart, theta)
    pair = extract_jacobi_pair(contact)

    msq = mass_squared(free, mass)
    momenta = [free.symbol(f"p{mu}") for mu in INDICES]
    ambient_pair = JacobiPair(
        ambient,
        ambient_bivector(ambient, 'p', 'x', momenta, msq),
        vectors(ambient, [(f"x{mu}", momenta[mu] / msq) for mu in INDICES]),
    )
    _require(pair.bivector == restrict(ambient_pair.bivector, chart),
             "extracted bivector differs from (g - p p / m^2) @p /\\ @x")
    _require(pair.reeb == restrict(ambient_pair.reeb, chart),
             "extracted Reeb field differs from p^mu / m^2 @x^mu")

    model = MassShellModel(ambient, chart, immersion, theta0, theta, contact, pair, ambient_pair, mass)
    failures = [r.id for r in mass_shell_table_checks(model) if r.failed]
    _require(not failures, f"mass-shell bracket table fails: {failures}")
    logger.info("mass shell built (m=%s)", 'symbolic' if mass is None else mass)
    return model


def _relation_record(check_id: str, ref: str, residuals: List[Tuple[str, RatExpr]],
                     constrained: bool) -> CheckRecord:
    bad = [(label, r) for label, r in residuals if not r.is_zero]
    return CheckRecord(check_id, ref, passed(not bad, constrained),
                       residual=f"{bad[0][0]}: {bad[0][1]}" if bad else None)


def mass_shell_table_checks(model: MassShellModel) -> List[CheckRecord]:
    pair, msq = model.pair, model.mass_squared()
    xx, px, pp = [], [], []
    for r in INDICES:
        for s in INDICES:
            label = f"{r}{s}"
            expected = (model.x(r) * model.p(s) - model.x(s) * model.p(r)) / msq
            xx.append((label, jacobi_bracket(pair, model.x(r), model.x(s)) - expected))
            metric = METRIC[r] if r == s else 0
            px.append((label, jacobi_bracket(pair, model.p(r), model.x(s)) - metric))
            pp.append((label, jacobi_bracket(pair, model.p(r), model.p(s))))
    return [
        _relation_record('mass-shell/table/x-x', '[x^r,x^s] = (x^r p^s - x^s p^r)/m^2', xx, True),
        _relation_record('mass-shell/table/p-x', '[p^r,x^s] = g^rs', px, True),
        _relation_record('mass-shell/table/p-p', '[p^r,p^s] = 0', pp, True),
    ]


def mass_shell_volume_check(model: MassShellModel) -> CheckRecord:
    """theta_m ^ (d theta_m)^3 against the coordinate expansion, up to a constant"""
    ambient = model.ambient
    ctx = ambient.context
    p = [ctx.symbol(f"p{mu}") for mu in INDICES]
    dp = [(f"p{mu}") for mu in INDICES]
    dx = tuple(f"x{mu}" for mu in INDICES)
    expansion = DifferentialForm.from_names(ambient, [
        ((dp[0], dp[1], dp[2]) + dx, p[3]),
        ((dp[0], dp[1], dp[3]) + dx, -p[2]),
        ((dp[0], dp[2], dp[3]) + dx, p[1]),
        ((dp[1], dp[2], dp[3]) + dx, p[0]),
    ])
    expected = pullback(model.immersion, expansion)
    volume = model.contact.volume
    key = sorted(expected.coeffs)[0]
    ratio = volume.coeffs.get(key, model.context.zero) / expected.coeffs[key]
    holds = ratio.is_constant and volume == expected * ratio
    return CheckRecord('mass-shell/contact-volume', 'theta_m^(d theta_m)^3 coordinate expansion',
                       passed(holds, True), measured=f"factor={ratio}" if holds else None)


def mass_shell_tangency_check(model: MassShellModel) -> CheckRecord:
    """Lambda and Gamma annihilate d(p.p) on the shell"""
    ambient = model.ambient
    ctx = ambient.context
    casimir = minkowski_dot(ctx, [ctx.symbol(f"p{mu}") for mu in INDICES],
                            [ctx.symbol(f"p{mu}") for mu in INDICES])
    dcas = differential(ambient, casimir)
    residuals = []
    for name, tensor in (('Lambda', model.ambient_pair.bivector), ('Gamma', model.ambient_pair.reeb)):
        for key, coeff in contract_form(tensor, dcas).coeffs.items():
            residuals.append((name, recontext(coeff, model.context)))
    return _relation_record('mass-shell/tangency', 'i_{d(p.p)} Lambda = i_{d(p.p)} Gamma = 0',
                            residuals, True)


def conformal_invariance_check(model: MassShellModel, factor: RatExpr) -> CheckRecord:
    """Pull back factor * theta0; a function of p.p turns into a constant"""
    free = model.ambient.context
    factor = free.coerce(factor)
    if any(name.startswith('x') for name in factor.free_symbols()):
        raise NotCasimirFunction(f"{factor} depends on positions")
    for rho, sigma in PAIRS:
        rotation = lorentz_field(model.ambient, ('p',), rho, sigma)
        if not apply_vector(rotation, factor).is_zero:
            raise NotCasimirFunction(f"{factor} is not a function of p.p")
    scaled = pullback(model.immersion, model.theta0 * factor)
    constant = recontext(factor, model.context)
    holds = constant.free_symbols() <= {'m'} and scaled == model.theta * constant
    return CheckRecord(f"mass-shell/conformal/{factor}", 'i*(f(p.p) theta0) = f(m^2) theta_m',
                       passed(holds, True), measured=f"constant={constant}")


def transport(tensor: GradedTensor, target: Chart, rename: Mapping[str, str],
              values: Optional[Mapping[str, object]] = None) -> GradedTensor:
    """Carry a tensor to another chart through a renaming (and fixed values)"""
    source = tensor.chart
    ctx = target.context
    images = {old: ctx.symbol(new) for old, new in rename.items()}
    images.update({name: ctx.coerce(value) for name, value in (values or {}).items()})
    result = type(tensor)(target, tensor.degree)
    for key, coeff in tensor.coeffs.items():
        names = [rename.get(source.coordinates[i], source.coordinates[i]) for i in key]
        result._accumulate(tuple(target.index(n) for n in names), substitute(coeff, images, ctx))
    return result


# -- two-point space -----------------------------------------------------------------

@dataclass
class TwoPointModel:
    ambient: Chart
    chart: Chart
    immersion: SmoothMap
    momentum_map: SmoothMap
    generating_function: RatExpr
    theta: DifferentialForm
    contact: ContactModel
    pair: JacobiPair
    ambient_pair: JacobiPair
    mass: Optional[Fraction] = None

    name = 'two-point'

    @property
    def context(self) -> ConstraintContext:
        return self.chart.context

    def mass_squared(self) -> RatExpr:
        return mass_squared(self.context, self.mass)

    def x(self, mu: int) -> RatExpr:
        return self.context.symbol(f"x{mu}")

    def y(self, mu: int) -> RatExpr:
        return self.context.symbol(f"y{mu}")

    def u(self, mu: int) -> RatExpr:
        """(x - y)^mu"""
        return self.x(mu) - self.y(mu)

    def w(self, mu: int) -> RatExpr:
        """(x + y)^mu"""
        return self.x(mu) + self.y(mu)

    def coordinate_functions(self) -> List[Tuple[str, RatExpr]]:
        return ([(f"x{mu}", self.x(mu)) for mu in INDICES]
                + [(f"y{mu}", self.y(mu)) for mu in INDICES])

    def sum_difference_functions(self) -> List[Tuple[str, RatExpr]]:
        return ([(f"(x+y){mu}", self.w(mu)) for mu in INDICES]
                + [(f"(x-y){mu}", self.u(mu)) for mu in INDICES])

    def generators(self) -> List[Tuple[str, RatExpr]]:
        """M^{rho sigma} = ((x+y)^rho (x-y)^sigma - (x-y)^rho (x+y)^sigma)/2, P^mu = (x-y)^mu"""
        gens = [(f"M{r}{s}", (self.w(r) * self.u(s) - self.u(r) * self.w(s)) / 2) for r, s in PAIRS]
        return gens + [(f"P{mu}", self.u(mu)) for mu in INDICES]

    def poincare_fields(self) -> List[Tuple[str, MultivectorField]]:
        return poincare_fields(self.ambient, self.chart, ('x', 'y'), ('x', 'y'))

    def table(self, pair: Optional[JacobiPair] = None) -> BracketTable:
        return bracket_table(pair or self.pair, self.sum_difference_functions())


def two_point_contexts(mass: Optional[Fraction] = None) -> Tuple[ConstraintContext, ConstraintContext]:
    """Free R4xR4 context and the (x-y)^2 = m^2 shell solved for y0"""
    ring = make_ring(TWO_POINT_VARS)
    free = ConstraintContext(ring, (), frozenset({'m'}), 'two-point-ambient')
    x0 = free.gen('x0')
    constant = mass_squared(free, mass).num - x0 ** 2
    for i in (1, 2, 3):
        constant = constant + (free.gen(f"x{i}") - free.gen(f"y{i}")) ** 2
    rule = QuadraticRule('y0', 2 * x0, constant)
    return free, free.with_rules([rule], 'two-point')


def build_two_point(mass: Optional[Fraction] = None) -> TwoPointModel:
    free, shell = two_point_contexts(mass)
    ambient = Chart('R4xR4', TWO_POINT_VARS[:8], free)
    witness = tuple((f"x{mu}", Fraction(0)) for mu in INDICES) + (
        ('y1', Fraction(1)), ('y2', Fraction(2)), ('y3', Fraction(3)))
    chart = Chart('Sigma2_m', TWO_POINT_VARS[:4] + TWO_POINT_VARS[5:8], shell, witness)

    u = [free.symbol(f"x{mu}") - free.symbol(f"y{mu}") for mu in INDICES]
    generating = minkowski_dot(free, u, u)
    cotangent_ctx, _ = mass_shell_contexts(mass)
    cotangent = Chart('T*R4', MASS_SHELL_VARS[:8], cotangent_ctx)
    images = {f"x{mu}": free.symbol(f"x{mu}") for mu in INDICES}
    for mu in INDICES:
        # p^mu = g^{mu mu} (1/2) dS/dx^mu
        images[f"p{mu}"] = partial_derivative(generating, f"x{mu}") * Fraction(METRIC[mu], 2)
    momentum_map = SmoothMap.build(ambient, cotangent, images)
    immersion = SmoothMap.build(chart, ambient, {n: shell.symbol(n) for n in ambient.coordinates})

    theta = pullback(immersion, pullback(momentum_map, liouville_form(cotangent)))
    contact = verify_contact(chart, theta)
    pair = extract_jacobi_pair(contact)

    msq = mass_squared(free, mass)
    ambient_pair = JacobiPair(
        ambient,
        ambient_bivector(ambient, 'x', 'y', u, msq),
        vectors(ambient, [(f"{q}{mu}", u[mu] / msq) for q in ('x', 'y') for mu in INDICES]),
    )
    _require(pair.bivector == restrict(ambient_pair.bivector, chart),
             "extracted bivector differs from (g - u u / m^2) @x /\\ @y")
    _require(pair.reeb == restrict(ambient_pair.reeb, chart),
             "extracted Reeb field differs from u^mu / m^2 (@x^mu + @y^mu)")

    model = TwoPointModel(ambient, chart, immersion, momentum_map, generating, theta,
                          contact, pair, ambient_pair, mass)
    failures = [r.id for r in two_point_table_checks(model) if r.failed]
    _require(not failures, f"two-point bracket table fails: {failures}")
    logger.info("two-point model built (m=%s)", 'symbolic' if mass is None else mass)
    return model


def two_point_table_checks(model: TwoPointModel) -> List[CheckRecord]:
    pair, msq = model.pair, model.mass_squared()
    ww, uw, uu = [], [], []
    for r in INDICES:
        for s in INDICES:
            label = f"{r}{s}"
            expected = (model.w(r) * model.u(s) - model.w(s) * model.u(r)) * 2 / msq
            ww.append((label, jacobi_bracket(pair, model.w(r), model.w(s)) - expected))
            metric = 2 * METRIC[r] if r == s else 0
            uw.append((label, jacobi_bracket(pair, model.u(r), model.w(s)) - metric))
            uu.append((label, jacobi_bracket(pair, model.u(r), model.u(s))))
    printed = jacobi_bracket(pair, model.w(0), model.u(0))
    return [
        _relation_record('two-point/table/sum-sum',
                         '[(x+y)^r,(x+y)^s] = 2((x+y)^r (x-y)^s - (x+y)^s (x-y)^r)/m^2', ww, True),
        _relation_record('two-point/table/diff-sum', '[(x-y)^r,(x+y)^s] = 2 g^rs', uw, True),
        _relation_record('two-point/table/diff-diff', '[(x-y)^r,(x-y)^s] = 0', uu, True),
        CheckRecord('two-point/table/printed-order', '[(x+y)^r,(x-y)^s] as printed: +2 g^rs',
                    MEASURED, measured=f"[(x+y)^0,(x-y)^0] = {printed}"),
    ]


def two_point_checks(model: TwoPointModel) -> List[CheckRecord]:
    """Normalization ledger and consistency with the one-point picture"""
    free = model.ambient.context
    gradient = [partial_derivative(model.generating_function, f"x{mu}") for mu in INDICES]
    grad_sq = recontext(minkowski_dot(free, gradient, gradient), model.context)
    factor = grad_sq / model.mass_squared()
    records = [CheckRecord('two-point/hamilton-jacobi-factor', 'g^{mu nu} S_mu S_nu = c m^2',
                           MEASURED, measured=f"c={factor}")]

    shell = build_mass_shell_generators_free(model.mass)
    residuals = []
    for (label, one_point), (_, two_point) in zip(shell, model.generators()):
        image = recontext(model.momentum_map.apply(one_point), model.context)
        residuals.append((label, image - two_point))
    records.append(_relation_record('two-point/one-point-generators',
                                    'M, P under p = x - y match the two-point generators',
                                    residuals, True))
    return records


def build_mass_shell_generators_free(mass: Optional[Fraction] = None) -> List[Tuple[str, RatExpr]]:
    """Upper-family generators as functions on T*R4"""
    free, _ = mass_shell_contexts(mass)
    x = [free.symbol(f"x{mu}") for mu in INDICES]
    p = [free.symbol(f"p{mu}") for mu in INDICES]
    gens = [(f"M{r}{s}", x[r] * p[s] - x[s] * p[r]) for r, s in PAIRS]
    return gens + [(f"P{mu}", p[mu]) for mu in INDICES]


# -- Lagrangian model ----------------------------------------------------------------

@dataclass
class LagrangianModel:
    ambient: Chart
    chart: Chart
    immersion: SmoothMap
    theta_lagrangian: DifferentialForm
    theta: DifferentialForm
    omega_ambient: DifferentialForm
    omega: DifferentialForm
    contact: ContactModel
    pair: JacobiPair

    name = 'lagrangian'
    mass = Fraction(1)

    @property
    def context(self) -> ConstraintContext:
        return self.chart.context

    def x(self, mu: int) -> RatExpr:
        return self.context.symbol(f"x{mu}")

    def v(self, mu: int) -> RatExpr:
        return self.context.symbol(f"v{mu}")

    def coordinate_functions(self) -> List[Tuple[str, RatExpr]]:
        return ([(f"x{mu}", self.x(mu)) for mu in INDICES]
                + [(f"v{mu}", self.v(mu)) for mu in INDICES])

    def generators(self) -> List[Tuple[str, RatExpr]]:
        gens = [(f"M{r}{s}", self.x(r) * self.v(s) - self.x(s) * self.v(r)) for r, s in PAIRS]
        return gens + [(f"P{mu}", self.v(mu)) for mu in INDICES]

    def poincare_fields(self) -> List[Tuple[str, MultivectorField]]:
        return poincare_fields(self.ambient, self.chart, ('x', 'v'), ('x',))

    def table(self, pair: Optional[JacobiPair] = None) -> BracketTable:
        return bracket_table(pair or self.pair, self.coordinate_functions())


def lagrangian_contexts() -> Tuple[ConstraintContext, ConstraintContext]:
    """L^2 -> v.v on TR4, and v0^2 -> 1 + sum vi^2 on the unit shell"""
    ring = make_ring(LAGRANGIAN_VARS)
    bare = ConstraintContext(ring, (), frozenset(), 'tangent-bundle')
    v = [bare.gen(f"v{mu}") for mu in INDICES]
    length = QuadraticRule('L', ring.zero, v[0] ** 2 - v[1] ** 2 - v[2] ** 2 - v[3] ** 2)
    unit = QuadraticRule('v0', ring.zero, ring.one + v[1] ** 2 + v[2] ** 2 + v[3] ** 2)
    return bare.with_rules([length], 'tangent-bundle'), bare.with_rules([unit], 'unit-velocity')


def projector_form(chart: Chart) -> DifferentialForm:
    """Omega = P_{mu nu} dv^mu ^ dx^nu, P_{mu nu} = g_{mu nu} - v_mu v_nu"""
    ctx = chart.context
    lower = [ctx.symbol(f"v{mu}") * METRIC[mu] for mu in INDICES]
    terms = []
    for mu in INDICES:
        for nu in INDICES:
            coeff = -lower[mu] * lower[nu]
            if mu == nu:
                coeff = coeff + METRIC[mu]
            terms.append(((f"v{mu}", f"x{nu}"), coeff))
    return DifferentialForm.from_names(chart, terms)


def build_lagrangian_model() -> LagrangianModel:
    tangent, unit = lagrangian_contexts()
    ambient = Chart('TR4', LAGRANGIAN_VARS[:8], tangent)
    witness = tuple((f"x{mu}", Fraction(0)) for mu in INDICES) + (
        ('v1', Fraction(1)), ('v2', Fraction(2)), ('v3', Fraction(3)))
    chart = Chart('Sigma_v', LAGRANGIAN_VARS[:4] + LAGRANGIAN_VARS[5:8], unit, witness)

    length = tangent.symbol('L')
    theta_lagrangian = DifferentialForm.from_names(
        ambient, [((f"x{mu}",), partial_derivative(length, f"v{mu}")) for mu in INDICES])
    images = {n: unit.symbol(n) for n in ambient.coordinates}
    images['L'] = unit.one
    immersion = SmoothMap.build(chart, ambient, images)

    theta = pullback(immersion, theta_lagrangian)
    _require(theta == liouville_form(chart, 'v'), "theta_L does not reduce to g_{mu nu} v^nu dx^mu")
    omega_ambient = projector_form(ambient)
    omega = pullback(immersion, omega_ambient)
    _require(exterior_derivative(theta) == omega, "d Theta differs from Omega on v.v = 1")

    contact = verify_contact(chart, theta)
    pair = extract_jacobi_pair(contact)
    model = LagrangianModel(ambient, chart, immersion, theta_lagrangian, theta,
                            omega_ambient, omega, contact, pair)
    logger.info("Lagrangian model built")
    return model


def lagrangian_checks(model: LagrangianModel, shell: Optional[MassShellModel] = None) -> List[CheckRecord]:
    shell = shell or build_mass_shell(Fraction(1))
    unit = model.context
    records = [
        CheckRecord('lagrangian/theta-reduces', 'theta_L = g_{mu nu} v^nu dx^mu on v.v = 1',
                    passed(model.theta == liouville_form(model.chart, 'v'), True)),
        CheckRecord('lagrangian/d-theta-omega', 'd Theta = Omega on v.v = 1',
                    passed(exterior_derivative(model.theta) == model.omega, True)),
    ]

    ambient_ctx = model.ambient.context
    v = [ambient_ctx.symbol(f"v{mu}") for mu in INDICES]
    kernel = []
    for prefix in ('x', 'v'):
        direction = vectors(model.ambient, [(f"{prefix}{mu}", v[mu]) for mu in INDICES])
        contraction = interior_vector(direction, model.omega_ambient)
        kernel.extend((prefix, recontext(c, unit)) for c in contraction.coeffs.values())
    records.append(_relation_record('lagrangian/omega-kernel', 'i_{v @x} Omega = i_{v @v} Omega = 0',
                                    kernel, True))

    rename = {f"p{mu}": f"v{mu}" for mu in INDICES}
    rename.update({f"x{mu}": f"x{mu}" for mu in INDICES})
    same = (transport(shell.theta, model.chart, rename, {'m': 1}) == model.theta
            and transport(shell.pair.bivector, model.chart, rename, {'m': 1}) == model.pair.bivector
            and transport(shell.pair.reeb, model.chart, rename, {'m': 1}) == model.pair.reeb)
    records.append(CheckRecord('lagrangian/mass-shell-transport',
                               '(theta, Lambda, Gamma) at m = 1 under p -> v', passed(same, True)))

    xx = []
    for r in INDICES:
        for s in INDICES:
            expected = model.x(r) * model.v(s) - model.x(s) * model.v(r)
            xx.append((f"{r}{s}", jacobi_bracket(model.pair, model.x(r), model.x(s)) - expected))
    records.append(_relation_record('lagrangian/table/x-x', '[x^r,x^s] = x^r v^s - x^s v^r', xx, True))
    return records


def hamiltonian_generator_checks(model: MassShellModel) -> List[CheckRecord]:
    """X_{p_mu} = @x^mu and X_{M_{rho sigma}} = x_rho @x^sigma - x_sigma @x^rho + (p)"""
    translations = []
    for mu in INDICES:
        field = hamiltonian_vector_field(model.pair, model.p(mu) * METRIC[mu])
        expected = restrict(translation_field(model.ambient, ('x',), mu), model.chart)
        translations.append((f"{mu}", field - expected))
    rotations = []
    for r, s in PAIRS:
        lower = (model.x(r) * model.p(s) - model.x(s) * model.p(r)) * (METRIC[r] * METRIC[s])
        field = hamiltonian_vector_field(model.pair, lower)
        expected = restrict(lorentz_field(model.ambient, ('x', 'p'), r, s), model.chart)
        rotations.append((f"{r}{s}", field - expected))

    def record(check_id, ref, residuals):
        bad = [(label, t) for label, t in residuals if not t.is_zero]
        return CheckRecord(check_id, ref, passed(not bad, True),
                           residual=f"{bad[0][0]}: {bad[0][1]}" if bad else None)

    return [
        record('mass-shell/hamiltonian/translations', 'X_{p_mu} = @x^mu', translations),
        record('mass-shell/hamiltonian/rotations',
               'X_{M_rs} = x_r @x^s - x_s @x^r + p_r @p^s - p_s @p^r', rotations),
    ]
