"""Shared fixtures: seeded generators, free charts and cached models"""

from fractions import Fraction

import numpy as np
import pytest

from exact_algebra import ConstraintContext, make_ring
from exterior_calculus import Chart
from settings import EngineSettings
from verification_suites import PROPERTY_RUNS, lagrangian_model, mass_shell_model, two_point_model

FREE_VARS = ('x', 'y', 'z', 'u', 'v')


@pytest.fixture
def rng():
    return np.random.default_rng(EngineSettings().seed)


@pytest.fixture(scope='session')
def free_chart():
    ring = make_ring(FREE_VARS)
    return Chart('R5', FREE_VARS, ConstraintContext(ring, (), frozenset(), 'R5'))


def random_poly(ctx, names, rng, terms=3, degree=2, low=-3, high=4):
    """Small random polynomial with integer coefficients"""
    total = ctx.zero
    for _ in range(terms):
        coeff = int(rng.integers(low, high))
        if coeff == 0:
            continue
        term = ctx.const(coeff)
        for _ in range(int(rng.integers(0, degree + 1))):
            term = term * ctx.symbol(names[int(rng.integers(0, len(names)))])
        total = total + term
    return total


def random_tensor(cls, chart, degree, rng, terms=2, poly_degree=1):
    """Random form or multivector with random polynomial coefficients"""
    tensor = cls(chart, degree)
    for _ in range(terms):
        indices = tuple(int(i) for i in rng.choice(chart.dim, size=degree, replace=False))
        tensor._accumulate(indices, random_poly(chart.context, chart.coordinates, rng, 2, poly_degree))
    return tensor


@pytest.fixture(scope='session')
def mass_shell():
    return mass_shell_model(None)


@pytest.fixture(scope='session')
def unit_mass_shell():
    return mass_shell_model(Fraction(1))


@pytest.fixture(scope='session')
def two_point():
    return two_point_model(None)


@pytest.fixture(scope='session')
def lagrangian():
    return lagrangian_model()
