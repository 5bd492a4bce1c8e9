"""
Verification Suites
===================
One battery per model. Every identity becomes a check record.

Suites: mass-shell, two-point, lagrangian, operator, peierls, all.
"""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from engine_errors import UsageError
from exact_algebra import RatExpr, minkowski_dot, partial_derivative, recontext, substitute
from exterior_calculus import MultivectorField, function_form, interior_vector
from contact_jacobi import (
    JacobiPair, coefficient_mode_experiment, contact_checks, extract_jacobi_pair,
    homomorphism_defect, jacobi_bracket, leibniz_defect, schouten_cross_check, verify_jacobi_identity,
    verify_structure_equations,
)
from geodesic_peierls import (
    DeltaFunctional, Geodesic, GreenKernel, JacobiField, advanced_kernel, decompose_jacobi_field,
    jacobi_operator_apply, kernel_source, mat_mul, mat_vec, omega_eval, peierls_bracket,
    projector, reparam_invariant, retarded_kernel, theta_eval,
)
from minkowski_models import (
    MODEL_NAMES, build_lagrangian_model, build_mass_shell, build_two_point,
    conformal_invariance_check, hamiltonian_generator_checks, lagrangian_checks, mass_shell_table_checks,
    mass_shell_tangency_check, mass_shell_volume_check, poincare_invariance_check,
    structure_constants_check, two_point_checks, two_point_table_checks,
)
from operator_symbols import (
    DifferentialOperator, commutator, hj_residual, iterated_symbol, operator_chart, operator_shell,
    plane_wave_conjugation, raw_iterated_commutator, separation_shell,
)
from verification_report import FAIL, MEASURED, CheckRecord, VerificationReport, passed, run_checks
from settings import EngineSettings

logger = logging.getLogger(__name__)

SUITES = ('mass-shell', 'two-point', 'lagrangian', 'operator', 'peierls', 'all')
CORRUPTIBLE = ('lambda', 'gamma')
PROPERTY_RUNS = 50


@dataclass(frozen=True)
class SuiteOptions:
    mode: str = 'standard'
    mass: Optional[Fraction] = None
    corrupt: Optional[str] = None
    workers: int = 0
    seed: int = EngineSettings.seed

    def __post_init__(self):
        if self.mode not in ('standard', 'paper'):
            raise UsageError(f"unknown mode '{self.mode}'; use standard or paper")
        if self.corrupt is not None and self.corrupt not in CORRUPTIBLE:
            raise UsageError(f"cannot corrupt '{self.corrupt}'; use lambda or gamma")


# -- cached models ------------------------------------------------------------------

@lru_cache(maxsize=None)
def mass_shell_model(mass: Optional[Fraction] = None):
    return build_mass_shell(mass)


@lru_cache(maxsize=None)
def two_point_model(mass: Optional[Fraction] = None):
    return build_two_point(mass)


@lru_cache(maxsize=None)
def lagrangian_model():
    return build_lagrangian_model()


def load_model(name: str, mass: Optional[Fraction] = None):
    """Built model by CLI name"""
    if name == 'mass-shell':
        return mass_shell_model(mass)
    if name == 'two-point':
        return two_point_model(mass)
    if name == 'lagrangian':
        if mass not in (None, 1):
            raise UsageError("the Lagrangian model fixes m = 1")
        return lagrangian_model()
    raise UsageError(f"unknown model '{name}'; use mass-shell, two-point or lagrangian")


def working_pair(model, options: SuiteOptions) -> JacobiPair:
    """The model's pair, re-extracted in paper mode and corrupted on request"""
    pair = model.pair
    if options.mode != 'standard':
        pair = extract_jacobi_pair(model.contact, options.mode)
    if options.corrupt:
        logger.warning("corrupting %s on %s", options.corrupt, model.chart.name)
        pair = pair.corrupted(options.corrupt)
    return pair


# -- shared batteries ----------------------------------------------------------------

def build_report(suite: str, checks: List[Callable], options: SuiteOptions) -> VerificationReport:
    """Run the checks; records of a model suite carry the model and bracket mode"""
    report = VerificationReport(suite)
    records = run_checks(checks, options.workers)
    if suite in MODEL_NAMES:
        for record in records:
            record.model = record.model or suite
            record.mode = record.mode or options.mode
    report.extend(records)
    return report


def reeb_defining_check(model, pair: JacobiPair, prefix: str) -> CheckRecord:
    """i_Gamma theta = 1 and i_Gamma d theta = 0"""
    contact = model.contact
    normal = interior_vector(pair.reeb, contact.theta) == function_form(model.chart, 1)
    flat = interior_vector(pair.reeb, contact.dtheta).is_zero
    return CheckRecord(f"{prefix}reeb-defining", 'i_Gamma theta = 1, i_Gamma d theta = 0',
                       passed(normal and flat, True))


def coefficient_experiment_check(model, pair: JacobiPair, prefix: str) -> CheckRecord:
    """Which volume-bracket coefficient reproduces the (Lambda, Gamma) bracket"""
    functions = [f for _, f in model.coordinate_functions()]
    outcome = coefficient_mode_experiment(model.contact, pair, functions)
    agreeing = [mode for mode, agrees in outcome.items() if agrees]
    text = ', '.join(f"{mode}={'agrees' if agrees else 'differs'}" for mode, agrees in outcome.items())
    return CheckRecord(f"{prefix}coefficient-experiment",
                       'c1 [f,g] theta^(d theta)^n = c1 df^dg^theta^(d theta)^(n-1) + (f dg - g df)^(d theta)^n',
                       MEASURED if len(agreeing) == 1 else FAIL, measured=text)


def random_function(coords: Sequence[RatExpr], rng: np.random.Generator, terms: int = 2) -> RatExpr:
    """Small integer combination of coordinate monomials of degree 1 or 2"""
    ctx = coords[0].context
    total = ctx.zero
    for _ in range(terms):
        term = ctx.const(int(rng.integers(1, 4)) * int(rng.choice((-1, 1))))
        for _ in range(int(rng.integers(1, 3))):
            term = term * coords[int(rng.integers(0, len(coords)))]
        total = total + term
    return total


BRACKET_PROPERTIES = (
    ('antisymmetry', '[f,g] + [g,f] = 0'),
    ('leibniz-defect', '[f,gh] - [f,g]h - g[f,h] + [f,1]gh = 0'),
    ('hamiltonian-homomorphism', '[X_f,X_g]_S = X_[f,g]'),
)


def bracket_property_check(model, pair: JacobiPair, prefix: str, seed: int,
                           runs: int = PROPERTY_RUNS) -> List[CheckRecord]:
    """Bracket identities on seeded random functions of the model coordinates"""
    coords = [f for _, f in model.coordinate_functions()]
    rng = np.random.default_rng(seed)
    failures: Dict[str, List[int]] = {name: [] for name, _ in BRACKET_PROPERTIES}
    for run in range(runs):
        f, g, h = (random_function(coords, rng) for _ in range(3))
        if not (jacobi_bracket(pair, f, g) + jacobi_bracket(pair, g, f)).is_zero:
            failures['antisymmetry'].append(run)
        if not leibniz_defect(pair, f, g, h).is_zero:
            failures['leibniz-defect'].append(run)
        if not homomorphism_defect(pair, f, g).is_zero:
            failures['hamiltonian-homomorphism'].append(run)

    constrained = bool(pair.chart.context.rules)
    records = []
    for name, ref in BRACKET_PROPERTIES:
        bad = failures[name]
        records.append(CheckRecord(f"{prefix}{name}", ref, passed(not bad, constrained),
                                   residual=f"samples {bad[:5]}" if bad else None,
                                   measured=f"{runs - len(bad)}/{runs} samples"))
    return records


def jacobi_functions(model) -> List[RatExpr]:
    """Every other coordinate plus a product, so nonlinear brackets are exercised"""
    coords = [f for _, f in model.coordinate_functions()]
    return coords[::2] + [coords[0] * coords[5]]


def model_checks(model, pair: JacobiPair, prefix: str, seed: int) -> List[Callable]:
    """Batteries every contact model shares"""
    tensors = [('theta', model.theta), ('Lambda', pair.bivector), ('Gamma', pair.reeb)]
    ambient = getattr(model, 'ambient_pair', None)
    return [
        lambda: reeb_defining_check(model, pair, prefix),
        lambda: contact_checks(model.contact, pair, prefix),
        lambda: verify_structure_equations(pair, ambient, prefix),
        lambda: schouten_cross_check(pair, prefix),
        lambda: verify_jacobi_identity(pair, jacobi_functions(model), f"{prefix}jacobi-identity"),
        lambda: bracket_property_check(model, pair, prefix, seed),
        lambda: coefficient_experiment_check(model, model.pair, prefix),
        lambda: poincare_invariance_check(prefix.rstrip('/'), model.poincare_fields(), tensors),
        lambda: structure_constants_check(prefix.rstrip('/'), model.generators(), pair),
    ]


# -- model suites --------------------------------------------------------------------

def mass_shell_suite(options: SuiteOptions) -> VerificationReport:
    model = mass_shell_model(options.mass)
    pair = working_pair(model, options)
    working = replace(model, pair=pair)
    ctx = model.ambient.context
    momenta = [ctx.symbol(f"p{mu}") for mu in range(4)]
    casimir = minkowski_dot(ctx, momenta, momenta)
    checks = model_checks(model, pair, 'mass-shell/', options.seed) + [
        lambda: mass_shell_volume_check(model),
        lambda: mass_shell_table_checks(working),
        lambda: mass_shell_tangency_check(model),
        lambda: hamiltonian_generator_checks(working),
        lambda: conformal_invariance_check(model, casimir * casimir + 3),
    ]
    return build_report('mass-shell', checks, options)


def two_point_suite(options: SuiteOptions) -> VerificationReport:
    model = two_point_model(options.mass)
    pair = working_pair(model, options)
    working = replace(model, pair=pair)
    checks = model_checks(model, pair, 'two-point/', options.seed) + [
        lambda: two_point_table_checks(working),
        lambda: two_point_checks(model),
    ]
    return build_report('two-point', checks, options)


def lagrangian_suite(options: SuiteOptions) -> VerificationReport:
    if options.mass not in (None, 1):
        logger.info("lagrangian suite keeps m = 1; ignoring m = %s", options.mass)
    model = lagrangian_model()
    pair = working_pair(model, options)
    working = replace(model, pair=pair)
    checks = model_checks(model, pair, 'lagrangian/', options.seed) + [
        lambda: lagrangian_checks(working, mass_shell_model(Fraction(1))),
    ]
    return build_report('lagrangian', checks, options)


# -- operator suite ------------------------------------------------------------------

def _relation(check_id: str, ref: str, holds: bool, constrained: bool = False,
              residual=None) -> CheckRecord:
    return CheckRecord(check_id, ref, passed(holds, constrained),
                       residual=None if holds or residual is None else str(residual))


def operator_checks() -> List[Callable]:
    chart = operator_chart()
    ctx = chart.context
    x = [ctx.symbol(f"x{mu}") for mu in range(4)]
    y = [ctx.symbol(f"y{mu}") for mu in range(4)]
    k = [ctx.symbol(f"k{mu}") for mu in range(4)]
    m = ctx.symbol('m')
    u = [a - b for a, b in zip(x, y)]
    box = DifferentialOperator.dalembertian(chart)
    plane = minkowski_dot(ctx, k, x)
    separation = minkowski_dot(ctx, u, u)
    k_shell = operator_shell(chart)
    sep_shell = separation_shell(chart)

    def box_commutator():
        expected = DifferentialOperator(chart)
        for mu in range(4):
            expected = expected + DifferentialOperator.derivative(chart, f"x{mu}") * (k[mu] * 2)
        value = commutator(box, DifferentialOperator.multiplication(chart, plane))
        return _relation('operator/commutator-box-plane', '[box, k.x] = 2 k^mu d_mu',
                         value == expected, residual=value - expected)

    def plane_symbol():
        value = iterated_symbol(box, plane)
        on_shell = recontext(value, k_shell) == recontext(m * m, k_shell)
        return _relation('operator/symbol-plane-wave', '[[box, S], S] / 2! = k.k = m^2 on k.k = m^2',
                         value == minkowski_dot(ctx, k, k) and on_shell, True, value)

    def normalization():
        raw = raw_iterated_commutator(box, plane) / minkowski_dot(ctx, k, k)
        sep = iterated_symbol(box, separation) / separation
        return CheckRecord('operator/symbol-normalization', '[[box, S], S] = c g^{mu nu} S_mu S_nu',
                           MEASURED, measured=f"raw/(k.k)={raw}, symbol((x-y)^2)/(x-y)^2={sep}")

    def pullback_compatibility():
        conjugated = plane_wave_conjugation(box, ctx)
        bad = []
        for label, generating in (('k.x', plane), ('(x-y)^2', separation)):
            images = {f"p{mu}": partial_derivative(generating, f"x{mu}") for mu in range(4)}
            if substitute(conjugated, images) != iterated_symbol(box, generating):
                bad.append(label)
        return _relation('operator/symbol-pullback', 'symbol(D, S) = f_D at p = dS', not bad,
                         residual=', '.join(bad))

    def conjugation():
        pp = minkowski_dot(ctx, [ctx.symbol(f"p{mu}") for mu in range(4)],
                           [ctx.symbol(f"p{mu}") for mu in range(4)])
        cases = [(box, pp), (DifferentialOperator.identity(chart), ctx.one),
                 (box + m * m, pp + m * m)]
        holds = all(plane_wave_conjugation(op, ctx, sign=sign) == expected
                    for op, expected in cases for sign in (1, -1))
        return _relation('operator/plane-wave', 'e^{+-ipx} box e^{-+ipx} = p.p', holds)

    def hamilton_jacobi():
        plane_residual = hj_residual(minkowski_dot(ctx, k, u), m * m, chart.coordinates, k_shell)
        sep_residual = hj_residual(separation, m * m * 4, chart.coordinates, sep_shell)
        factor = (hj_residual(separation, 0, chart.coordinates, sep_shell)
                  / recontext(m * m, sep_shell))
        return [
            _relation('operator/hamilton-jacobi-plane', 'g^{mu nu} S_mu S_nu = m^2, S = k.(x-y)',
                      plane_residual.is_zero, True, plane_residual),
            _relation('operator/hamilton-jacobi-separation', 'g^{mu nu} S_mu S_nu = 4 m^2, S = (x-y)^2',
                      sep_residual.is_zero, True, sep_residual),
            CheckRecord('operator/hamilton-jacobi-factor', 'g^{mu nu} S_mu S_nu = c m^2 on (x-y)^2 = m^2',
                        MEASURED, measured=f"c={factor}"),
        ]

    def operator_algebra():
        d = {mu: DifferentialOperator.derivative(chart, f"x{mu}") for mu in range(4)}
        mult = {mu: DifferentialOperator.multiplication(chart, x[mu]) for mu in range(4)}
        canonical = all(commutator(d[a], mult[b]) == DifferentialOperator.identity(chart) * (1 if a == b else 0)
                        for a in range(4) for b in range(4))
        first = box
        second = DifferentialOperator.multiplication(chart, x[0] * x[1]) * d[2]
        third = d[3] * (x[2] * x[2]) + mult[0]
        jacobi = (commutator(first, commutator(second, third))
                  + commutator(second, commutator(third, first))
                  + commutator(third, commutator(first, second)))
        drop = commutator(box, DifferentialOperator.multiplication(chart, separation)).order == 1
        return [
            _relation('operator/canonical-commutation', '[d_mu, x^nu] = delta_mu^nu', canonical),
            _relation('operator/commutator-jacobi', '[A,[B,C]] + [B,[C,A]] + [C,[A,B]] = 0',
                      jacobi == DifferentialOperator(chart)),
            _relation('operator/order-drop', 'order [box, S] = 1', drop),
        ]

    return [box_commutator, plane_symbol, normalization, pullback_compatibility,
            conjugation, hamilton_jacobi, operator_algebra]


def operator_suite(options: SuiteOptions) -> VerificationReport:
    if options.corrupt:
        logger.info("operator suite has no Jacobi pair to corrupt")
    return build_report('operator', operator_checks(), options)


# -- peierls suite -------------------------------------------------------------------

def _transpose(matrix):
    return [list(row) for row in zip(*matrix)]


def peierls_checks(shell_pair: JacobiPair) -> List[Callable]:
    geodesic = Geodesic.symbolic()
    ctx = geodesic.context
    k = geodesic.velocity
    s, s1, s2 = ctx.symbol('s'), ctx.symbol('s1'), ctx.symbol('s2')
    a = [ctx.symbol(f"a{mu}") for mu in range(4)]
    b = [ctx.symbol(f"b{mu}") for mu in range(4)]
    upper = projector(geodesic, 'upper')

    def at(mu, when):
        return DeltaFunctional([(ctx.symbol(f"x{mu}"), when)])

    def projector_identities():
        mixed = projector(geodesic, 'mixed')
        idempotent = mat_mul(mixed, mixed) == mixed
        transverse = all(c.is_zero for c in mat_vec(upper, geodesic.lower_velocity()))
        rest = Geodesic.numeric([0, 0, 0, 0], [1, 0, 0, 0], ctx)
        diagonal = projector(rest, 'lower') == [[ctx.coerce(-1 if i == j and i else 0) for j in range(4)]
                                                 for i in range(4)]
        return _relation('peierls/projector', 'P P = P, P k = 0, rest frame diag(0,-1,-1,-1)',
                         idempotent and transverse and diagonal, True)

    def jacobi_fields():
        field = JacobiField(a, b)
        kernel = all(c.is_zero for c in jacobi_operator_apply(geodesic, field.at(s)))
        along_k = all(c.is_zero for c in jacobi_operator_apply(geodesic, [s * s * kk for kk in k]))
        perp, rate, offset = decompose_jacobi_field(geodesic, field)
        rebuilt = all(p + (rate * s + offset) * kk == j
                      for p, kk, j in zip(perp.at(s), k, field.at(s)))
        orthogonal = geodesic.dot(perp.at(s), k).is_zero
        return [
            _relation('peierls/jacobi-operator', 'P d^2/ds^2 (J0 + s J0\') = 0, P d^2/ds^2 (s^2 k) = 0',
                      kernel and along_k, True),
            _relation('peierls/jacobi-decomposition', 'J = J_perp + (a s + b) k, <J_perp, k> = 0',
                      rebuilt and orthogonal, True),
        ]

    def conserved_forms():
        field = JacobiField(a, b)
        perp, _, _ = decompose_jacobi_field(geodesic, field)
        gauge = JacobiField(a, perp.rate)
        theta = theta_eval(geodesic, gauge)
        reeb = theta_eval(geodesic, JacobiField.along(geodesic, 0, 1)) == ctx.one
        first, second = JacobiField(a, b), JacobiField(b, a)
        omega = omega_eval(geodesic, first, second)
        degenerate = omega_eval(geodesic, JacobiField.along(geodesic, ctx.symbol('c1'), ctx.symbol('c2')),
                                second).is_zero
        antisymmetric = (omega + omega_eval(geodesic, second, first)).is_zero
        return [
            _relation('peierls/theta-conserved', 'd/ds <k, J> = 0 for <J\', k> = 0, Theta(k) = 1',
                      partial_derivative(theta, 's').is_zero and reeb, True),
            _relation('peierls/omega-conserved', 'd/ds (J1 P J2\' - J1\' P J2) = 0, kernel (a s + b) k',
                      partial_derivative(omega, 's').is_zero and degenerate and antisymmetric, True),
        ]

    def omega_initial_data():
        model = lagrangian_model()
        ambient = model.ambient
        amb = ambient.context
        samples = [([1, 2, 0, 1], [0, 1, 1, 0], [2, 0, 1, 3], [1, -1, 0, 2]),
                   ([0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0])]
        bad = 0
        for e1, f1, e2, f2 in samples:
            first = JacobiField([ctx.coerce(c) for c in e1], [ctx.coerce(c) for c in f1])
            second = JacobiField([ctx.coerce(c) for c in e2], [ctx.coerce(c) for c in f2])
            x1 = MultivectorField.from_names(ambient, [((f"x{mu}",), amb.coerce(e1[mu])) for mu in range(4)]
                                             + [((f"v{mu}",), amb.coerce(f1[mu])) for mu in range(4)])
            x2 = MultivectorField.from_names(ambient, [((f"x{mu}",), amb.coerce(e2[mu])) for mu in range(4)]
                                             + [((f"v{mu}",), amb.coerce(f2[mu])) for mu in range(4)])
            contracted = interior_vector(x1, interior_vector(x2, model.omega_ambient)).value()
            lifted = substitute(contracted, {f"v{mu}": k[mu] for mu in range(4)}, ctx)
            if lifted != omega_eval(geodesic, first, second):
                bad += 1
        return _relation('peierls/omega-initial-data', 'omega(J1, J2) = Omega(X_J2, X_J1)', not bad, True,
                         f"{bad} samples differ")

    def worked_example():
        bad = []
        for mu in range(4):
            for nu in range(4):
                value = peierls_bracket(geodesic, at(mu, s1), at(nu, s2))
                expected = (upper[mu][nu] * (s1 - s2) + geodesic.point(s1)[mu] * k[nu]
                            - geodesic.point(s2)[nu] * k[mu])
                if value != expected:
                    bad.append(f"{mu}{nu}")
        equal = peierls_bracket(geodesic, at(0, s), at(1, s))
        reduced = ctx.symbol('x0') * k[1] - ctx.symbol('x1') * k[0]
        return _relation('peierls/worked-example',
                         '[x^mu@s1, x^nu@s2] = P^{mu nu}(s1 - s2) + x^mu(s1) k^nu - x^nu(s2) k^mu',
                         not bad and equal == reduced, residual=', '.join(bad) or str(equal))

    def shell_consistency():
        shell_ctx = shell_pair.chart.context
        bad = []
        for r in range(4):
            for q in range(4):
                value = jacobi_bracket(shell_pair, shell_ctx.symbol(f"x{r}"), shell_ctx.symbol(f"x{q}"))
                images = {f"x{mu}": geodesic.point(s)[mu] for mu in range(4)}
                images.update({f"p{mu}": k[mu] for mu in range(4)})
                if substitute(value, images, ctx) != peierls_bracket(geodesic, at(r, s), at(q, s)):
                    bad.append(f"{r}{q}")
        return _relation('peierls/mass-shell-consistency', '[x^r@s, x^q@s] = [x^r, x^q] on m = 1, p = k',
                         not bad, True, ', '.join(bad))

    def antisymmetry_and_gauge():
        pairs = [(at(0, s1), at(2, s2)),
                 (DeltaFunctional([(ctx.symbol('x1') * ctx.symbol('x2'), s1), (ctx.symbol('x3'), 2)]),
                  DeltaFunctional([(ctx.symbol('x0') * ctx.symbol('x0'), Fraction(1, 2))]))]
        antisymmetric = all((peierls_bracket(geodesic, f, g) + peierls_bracket(geodesic, g, f)).is_zero
                            and peierls_bracket(geodesic, f, f).is_zero for f, g in pairs)
        first = DeltaFunctional([(ctx.symbol('x1'), s1), (-ctx.symbol('x1'), s2)])
        second = DeltaFunctional([(ctx.symbol('x2'), s), (-ctx.symbol('x2'), 0)])
        invariant = (reparam_invariant(first, geodesic) and reparam_invariant(second, geodesic)
                     and not reparam_invariant(at(1, s1), geodesic))
        shifted = GreenKernel(geodesic, ctx.symbol('c1'), ctx.symbol('c2'))
        gauge = peierls_bracket(geodesic, first, second, shifted) == peierls_bracket(geodesic, first, second)
        return [
            _relation('peierls/antisymmetry', '[A, B] = -[B, A], [A, A] = 0', antisymmetric, True),
            _relation('peierls/gauge-independence', 'G + (c1 (s - s\') + c2) k k leaves invariant brackets fixed',
                      invariant and gauge, True),
        ]

    def green_kernel():
        source = ctx.symbol('s1')
        expected = _transpose(projector(geodesic, 'mixed'))
        kernel = GreenKernel(geodesic)
        bad = []
        for label, carrier in (('retarded', retarded_kernel(geodesic, source)),
                               ('advanced', advanced_kernel(geodesic, source))):
            delta, regular = kernel_source(geodesic, carrier)
            if delta != expected or not regular:
                bad.append(label)
        retarded, advanced = retarded_kernel(geodesic, source), advanced_kernel(geodesic, source)
        for mu in range(4):
            for nu in range(4):
                commutator_kernel = kernel.entry(mu, nu, s, source)
                left = retarded[mu][nu].left - advanced[mu][nu].left
                right = retarded[mu][nu].right - advanced[mu][nu].right
                if left != commutator_kernel or right != commutator_kernel:
                    bad.append(f"G{mu}{nu}")
        return _relation('peierls/green-kernel', 'P d^2/ds^2 G(+-)(s, s0) = P delta(s - s0), G+ - G- = G',
                         not bad, True, ', '.join(bad))

    return [projector_identities, jacobi_fields, conserved_forms, omega_initial_data,
            worked_example, shell_consistency, antisymmetry_and_gauge, green_kernel]


def peierls_suite(options: SuiteOptions) -> VerificationReport:
    shell = mass_shell_model(Fraction(1))
    pair = shell.pair.corrupted(options.corrupt) if options.corrupt else shell.pair
    return build_report('peierls', peierls_checks(pair), options)


# -- dispatch ------------------------------------------------------------------------

SUITE_RUNNERS: Dict[str, Callable[[SuiteOptions], VerificationReport]] = {
    'mass-shell': mass_shell_suite,
    'two-point': two_point_suite,
    'lagrangian': lagrangian_suite,
    'operator': operator_suite,
    'peierls': peierls_suite,
}


def run_suite(name: str, options: Optional[SuiteOptions] = None) -> VerificationReport:
    """Run one suite, or every suite merged under 'all'"""
    options = options or SuiteOptions()
    if name == 'all':
        report = VerificationReport('all')
        for suite in SUITE_RUNNERS:
            report.merge(SUITE_RUNNERS[suite](options))
        return report
    if name not in SUITE_RUNNERS:
        raise UsageError(f"unknown suite '{name}'; choose from {', '.join(SUITES)}")
    logger.info("running suite %s (mode=%s, m=%s)", name, options.mode, options.mass)
    return SUITE_RUNNERS[name](options)
