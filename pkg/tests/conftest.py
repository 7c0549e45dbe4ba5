"""Shared fixtures: the three workhorse functions used across the suite.

- quadratic:  f(z) = lam*z + z**2/2          (P = 1 + t/lam, Q = 0)
- zexp:       f(z) = lam * z * exp(z)        (P = 1 + t,     Q = t)
- expm1_map:  f(z) = lam * (exp(z) - 1)      (P = 1,         Q = t)

The closed forms make every evaluation independently checkable, and the
golden-mean multiplier exp(2*pi*i*(sqrt(5)-1)/2) is the canonical
well-behaved irrational rotation.
"""

import cmath
import math

import pytest

from sflab.brjuno import expand, preset, rotation_to_lambda
from sflab.sfcore import SFFunction, Polynomial

GOLDEN_ALPHA = (math.sqrt(5.0) - 1.0) / 2.0


@pytest.fixture(scope="session")
def golden_lambda():
    return rotation_to_lambda(preset("golden", 60))


@pytest.fixture(scope="session")
def golden_quadratic(golden_lambda):
    lam = golden_lambda
    return SFFunction(lam, Polynomial.make([1.0, 1.0 / lam]), Polynomial.make([]))


def make_quadratic(lam):
    return SFFunction(lam, Polynomial.make([1.0, 1.0 / lam]), Polynomial.make([]))


def make_zexp(lam):
    return SFFunction(lam, Polynomial.make([1.0, 1.0]), Polynomial.make([0.0, 1.0]))


def make_expm1(lam):
    return SFFunction(lam, Polynomial.make([1.0]), Polynomial.make([0.0, 1.0]))


@pytest.fixture(scope="session")
def golden_zexp(golden_lambda):
    return make_zexp(golden_lambda)


@pytest.fixture(scope="session")
def golden_expm1(golden_lambda):
    return make_expm1(golden_lambda)
