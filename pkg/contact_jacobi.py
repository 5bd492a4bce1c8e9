"""
Contact Jacobi
==============
Contact forms in. Reeb fields, Jacobi pairs and brackets out.
"""

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from engine_errors import (
    ChartMismatch, EvenDimension, NoSolution, NotContact, NotTopForm, SolveFailed,
)
from exact_algebra import RatExpr, linear_solve
from exterior_calculus import (
    CancellationToken, Chart, DifferentialForm, MultivectorField, apply_vector,
    differential, exterior_derivative, function_form, interior_bivector, interior_vector,
    is_nonvanishing_top, lie_derivative, pair_bivector, schouten_bracket, schouten_bracket_recursive,
    top_coefficient, wedge,
)
from verification_report import FAIL, MEASURED, CheckRecord, passed

logger = logging.getLogger(__name__)

MODES = ('standard', 'paper')


@dataclass
class ContactModel:
    chart: Chart
    theta: DifferentialForm
    n: int
    dtheta: DifferentialForm
    dtheta_powers: List[DifferentialForm]
    volume: DifferentialForm


@dataclass
class JacobiPair:
    chart: Chart
    bivector: MultivectorField
    reeb: MultivectorField

    def __post_init__(self):
        if self.bivector.chart != self.chart or self.reeb.chart != self.chart:
            raise ChartMismatch("Jacobi pair tensors must share the pair's chart")

    def lam(self, a: int, b: int) -> RatExpr:
        """Lambda^{ab} for any index order"""
        zero = self.chart.context.zero
        if a == b:
            return zero
        if a < b:
            return self.bivector.coeffs.get((a, b), zero)
        return -self.bivector.coeffs.get((b, a), zero)

    def corrupted(self, tensor: str) -> 'JacobiPair':
        """Copy with the sign of one component flipped (negative controls)"""
        target = self.bivector if tensor == 'lambda' else self.reeb
        if target.is_zero:
            raise ValueError(f"cannot corrupt an empty {tensor}")
        key = sorted(target.coeffs)[0]
        coeffs = dict(target.coeffs)
        coeffs[key] = -coeffs[key]
        flipped = type(target)(self.chart, target.degree, coeffs)
        if tensor == 'lambda':
            return replace(self, bivector=flipped)
        return replace(self, reeb=flipped)


@dataclass
class BracketEntry:
    left: str
    right: str
    value: RatExpr


@dataclass
class BracketTable:
    entries: List[BracketEntry] = field(default_factory=list)

    def lookup(self, left: str, right: str) -> RatExpr:
        for entry in self.entries:
            if entry.left == left and entry.right == right:
                return entry.value
        raise KeyError(f"[{left}, {right}]")

    def is_antisymmetric(self) -> bool:
        for entry in self.entries:
            try:
                mirror = self.lookup(entry.right, entry.left)
            except KeyError:
                continue
            if not (entry.value + mirror).is_zero:
                return False
        return True

    def rows(self) -> List[Tuple[str, str, str]]:
        return [(e.left, e.right, str(e.value)) for e in self.entries]


# -- contact structure ----------------------------------------------------------

def verify_contact(chart: Chart, theta: DifferentialForm,
                   token: Optional[CancellationToken] = None) -> ContactModel:
    if theta.chart != chart:
        raise ChartMismatch(f"theta lives on {theta.chart.name}, not {chart.name}")
    if chart.dim % 2 == 0:
        raise EvenDimension(f"chart {chart.name} has even dimension {chart.dim}")
    n = (chart.dim - 1) // 2
    dtheta = exterior_derivative(theta, token)
    powers = [function_form(chart, 1)]
    for _ in range(n):
        powers.append(wedge(powers[-1], dtheta, token))
    volume = wedge(theta, powers[n], token)
    if not is_nonvanishing_top(volume):
        raise NotContact(f"theta ^ (d theta)^{n} vanishes on chart {chart.name}")
    logger.debug("contact form verified on %s (n=%d)", chart.name, n)
    return ContactModel(chart, theta, n, dtheta, powers, volume)


def reeb_field(model: ContactModel) -> MultivectorField:
    """Unique Gamma with i_Gamma theta = 1 and i_Gamma d theta = 0"""
    chart = model.chart
    ctx = chart.context
    dim = chart.dim
    names = chart.coordinates
    matrix = [[model.theta.component(name) for name in names]]
    rhs = [ctx.one]
    for b in names:
        matrix.append([model.dtheta.component(a, b) for a in names])
        rhs.append(ctx.zero)
    try:
        solution = linear_solve(matrix, rhs)
    except NoSolution as e:
        raise SolveFailed(f"Reeb system on {chart.name} is inconsistent: {e}") from e
    if not solution.is_unique:
        raise SolveFailed(f"Reeb system on {chart.name} has a {len(solution.kernel)}-dim kernel")
    return MultivectorField(chart, 1, {(a,): solution.particular[a] for a in range(dim)})


def reeb_volume_identity(model: ContactModel, reeb: MultivectorField) -> bool:
    """i_Gamma (theta ^ (d theta)^n) == (d theta)^n"""
    return interior_vector(reeb, model.volume) == model.dtheta_powers[model.n]


def bracket_from_volume(model: ContactModel, f: RatExpr, g: RatExpr,
                        coefficient_mode: str = 'standard') -> RatExpr:
    """[f,g] from the volume identity, c1 = n (standard) or n - 1 (paper)"""
    if coefficient_mode not in MODES:
        raise ValueError(f"unknown coefficient mode '{coefficient_mode}'")
    chart = model.chart
    n = model.n
    c1 = n if coefficient_mode == 'standard' else n - 1
    df, dg = differential(chart, f), differential(chart, g)
    first = wedge(wedge(wedge(df, dg), model.theta), model.dtheta_powers[n - 1]) * c1
    second = wedge(dg * f - df * g, model.dtheta_powers[n])
    rhs = first + second
    if not rhs.is_zero and rhs.degree != chart.dim:
        raise NotTopForm(f"right-hand side has degree {rhs.degree}, expected {chart.dim}")
    if rhs.is_zero:
        return chart.context.zero
    return top_coefficient(rhs) / top_coefficient(model.volume)


def jacobi_bracket(pair: JacobiPair, f: RatExpr, g: RatExpr) -> RatExpr:
    """Lambda(df, dg) + f Gamma(g) - g Gamma(f)"""
    chart = pair.chart
    if f.context != chart.context or g.context != chart.context:
        raise ChartMismatch(f"functions do not live on {chart.name}")
    value = pair_bivector(pair.bivector, differential(chart, f), differential(chart, g))
    return value + f * apply_vector(pair.reeb, g) - g * apply_vector(pair.reeb, f)


def extract_jacobi_pair(model: ContactModel, mode: str = 'standard') -> JacobiPair:
    chart = model.chart
    reeb = reeb_field(model)
    coords = [chart.coordinate(name) for name in chart.coordinates]
    gamma_of = [apply_vector(reeb, q) for q in coords]
    coeffs = {}
    for i in range(chart.dim):
        for j in range(i + 1, chart.dim):
            value = bracket_from_volume(model, coords[i], coords[j], mode)
            coeffs[(i, j)] = value - coords[i] * gamma_of[j] + coords[j] * gamma_of[i]
    logger.debug("extracted Jacobi pair on %s in %s mode", chart.name, mode)
    return JacobiPair(chart, MultivectorField(chart, 2, coeffs), reeb)


def hamiltonian_vector_field(pair: JacobiPair, f: RatExpr) -> MultivectorField:
    """X_f = Lambda(df, .) + f Gamma"""
    chart = pair.chart
    df = differential(chart, f)
    zero = chart.context.zero
    coeffs = {}
    for b in range(chart.dim):
        total = f * pair.reeb.coeffs.get((b,), zero)
        for (a,), fa in df.coeffs.items():
            total = total + pair.lam(a, b) * fa
        coeffs[(b,)] = total
    return MultivectorField(chart, 1, coeffs)


def leibniz_defect(pair: JacobiPair, f: RatExpr, g: RatExpr, h: RatExpr) -> RatExpr:
    """[f, gh] - [f,g] h - g [f,h] + [f,1] gh"""
    one = pair.chart.context.one
    return (jacobi_bracket(pair, f, g * h) - jacobi_bracket(pair, f, g) * h
            - g * jacobi_bracket(pair, f, h) + jacobi_bracket(pair, f, one) * g * h)


def is_poisson_element(pair: JacobiPair, f: RatExpr) -> bool:
    return apply_vector(pair.reeb, f).is_zero


def homomorphism_defect(pair: JacobiPair, f: RatExpr, g: RatExpr) -> MultivectorField:
    """[X_f, X_g]_S - X_[f,g]"""
    xf = hamiltonian_vector_field(pair, f)
    xg = hamiltonian_vector_field(pair, g)
    return schouten_bracket(xf, xg) - hamiltonian_vector_field(pair, jacobi_bracket(pair, f, g))


def bracket_table(pair: JacobiPair, functions: Sequence[Tuple[str, RatExpr]]) -> BracketTable:
    table = BracketTable()
    for left, f in functions:
        for right, g in functions:
            table.entries.append(BracketEntry(left, right, jacobi_bracket(pair, f, g)))
    return table


# -- verification batteries -------------------------------------------------------

def first_residual(tensor) -> Optional[str]:
    if tensor.is_zero:
        return None
    key = sorted(tensor.coeffs)[0]
    basis = tensor._basis_text(key) if key else 'scalar'
    return f"{basis}: {tensor.coeffs[key]}"


def structure_residuals(pair: JacobiPair,
                        token: Optional[CancellationToken] = None) -> Tuple[MultivectorField, MultivectorField]:
    schouten = schouten_bracket(pair.bivector, pair.bivector, token)
    wedge_term = wedge(pair.reeb, pair.bivector, token) * 2
    return schouten - wedge_term, lie_derivative(pair.reeb, pair.bivector, token)


def verify_structure_equations(pair: JacobiPair, ambient: Optional[JacobiPair] = None,
                               prefix: str = '') -> List[CheckRecord]:
    """[Lambda, Lambda]_S = 2 Gamma ^ Lambda and L_Gamma Lambda = 0

    When an ambient lift is supplied, an identity that already holds there
    is a plain pass; one that needs the constraint is pass-mod-constraint.
    """
    residuals = structure_residuals(pair)
    lifted = structure_residuals(ambient) if ambient is not None else (None, None)
    constrained = bool(pair.chart.context.rules)
    records = []
    labels = [('schouten', '[Lambda,Lambda]_S = 2 Gamma^Lambda'),
              ('lie-gamma-lambda', 'L_Gamma Lambda = 0')]
    for (name, ref), residual, lift in zip(labels, residuals, lifted):
        holds = residual.is_zero
        if lift is not None:
            needed = not lift.is_zero
        else:
            needed = constrained
        records.append(CheckRecord(f"{prefix}{name}", ref, passed(holds, needed),
                                   residual=first_residual(residual)))
    return records


def schouten_cross_check(pair: JacobiPair, prefix: str = '') -> CheckRecord:
    """[Lambda, Lambda] from the component formula against the Leibniz expansion"""
    component = schouten_bracket(pair.bivector, pair.bivector)
    residual = component - schouten_bracket_recursive(pair.bivector, pair.bivector)
    return CheckRecord(f"{prefix}schouten-cross-check", 'component [Lambda,Lambda] = Leibniz [Lambda,Lambda]',
                       passed(residual.is_zero, False), residual=first_residual(residual))


def verify_jacobi_identity(pair: JacobiPair, functions: Sequence[RatExpr],
                           check_id: str = 'jacobi-identity') -> CheckRecord:
    """[f,[g,h]] = [[f,g],h] + [g,[f,h]] on every ordered triple"""
    cache: Dict[Tuple[int, int], RatExpr] = {}
    fs = list(functions)

    def bracket(i, j):
        if (i, j) not in cache:
            cache[(i, j)] = jacobi_bracket(pair, fs[i], fs[j])
        return cache[(i, j)]

    failures = []
    total = 0
    for i in range(len(fs)):
        for j in range(len(fs)):
            for k in range(len(fs)):
                total += 1
                residual = (jacobi_bracket(pair, fs[i], bracket(j, k))
                            - jacobi_bracket(pair, bracket(i, j), fs[k])
                            - jacobi_bracket(pair, fs[j], bracket(i, k)))
                if not residual.is_zero:
                    failures.append(f"({i},{j},{k}): {residual}")
    status = passed(not failures, bool(pair.chart.context.rules))
    return CheckRecord(check_id, '[f,[g,h]] = [[f,g],h] + [g,[f,h]]', status,
                       residual='; '.join(failures[:3]) if failures else None,
                       measured=f"{total - len(failures)}/{total} triples")


def volume_contraction_factor(model: ContactModel, pair: JacobiPair) -> Optional[Fraction]:
    """c with i_Lambda (theta ^ (d theta)^n) == c theta ^ (d theta)^(n-1)"""
    lhs = interior_bivector(pair.bivector, model.volume)
    rhs = wedge(model.theta, model.dtheta_powers[model.n - 1])
    if rhs.is_zero:
        return Fraction(0) if lhs.is_zero else None
    key = sorted(rhs.coeffs)[0]
    ratio = lhs.coeffs.get(key, model.chart.context.zero) / rhs.coeffs[key]
    if not ratio.is_constant or lhs != rhs * ratio:
        return None
    return ratio.as_fraction()


def coefficient_mode_experiment(model: ContactModel, reference: JacobiPair,
                                functions: Sequence[RatExpr]) -> Dict[str, bool]:
    """Which volume-bracket coefficient reproduces the reference bracket"""
    outcome = {}
    for mode in MODES:
        outcome[mode] = all(
            (bracket_from_volume(model, f, g, mode) - jacobi_bracket(reference, f, g)).is_zero
            for i, f in enumerate(functions) for g in functions[i + 1:]
        )
    logger.info("coefficient experiment on %s: %s", model.chart.name, outcome)
    return outcome


def contact_checks(model: ContactModel, pair: JacobiPair, prefix: str = '') -> List[CheckRecord]:
    """Reeb volume identity plus the measured bivector contraction factor"""
    records = [CheckRecord(f"{prefix}reeb-volume", 'i_Gamma theta^(d theta)^n = (d theta)^n',
                           passed(reeb_volume_identity(model, pair.reeb), bool(model.chart.context.rules)))]
    factor = volume_contraction_factor(model, pair)
    records.append(CheckRecord(
        f"{prefix}bivector-volume-factor", 'i_Lambda theta^(d theta)^n = n theta^(d theta)^(n-1)',
        MEASURED if factor is not None else FAIL,
        measured=f"factor={factor} n={model.n}" if factor is not None else None,
        residual=None if factor is not None else 'not proportional'))
    return records
