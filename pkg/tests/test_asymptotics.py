from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymprod.asymptotics import (
    c_upper_bound,
    exercise_limit,
    growth_exponent,
    k_asymptote,
    k_gamma_identity,
    log_gamma,
    log_gamma_shift,
)
from asymprod.errors import EvaluationDomainError, PreconditionError
from asymprod.products import ProductParams, eval_K, exact_k_product

mpmath.mp.dps = 40


def mp_lgamma(x):
    return float(mpmath.loggamma(mpmath.mpf(x)))


@pytest.mark.parametrize("x", [1e-3, 0.1, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.2, 3.7, 10.0, 171.5, 1e4, 1e6])
def test_log_gamma_against_mpmath(x):
    exact = mp_lgamma(x)
    assert abs(log_gamma(x) - exact) <= 2e-14 * max(1.0, abs(exact))


def test_log_gamma_relative_accuracy_near_zeros():
    for x in (1 + 1e-8, 1 - 1e-6, 2 + 1e-9, 2 - 1e-5, 1.3, 1.7):
        exact = mp_lgamma(x)
        assert log_gamma(x) == pytest.approx(exact, rel=1e-13)


def test_log_gamma_exact_values():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(2.0) == 0.0
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-15)
    assert log_gamma(11.0) == pytest.approx(math.log(3628800), rel=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, math.inf, math.nan])
def test_log_gamma_domain(x):
    with pytest.raises(EvaluationDomainError):
        log_gamma(x)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(1e-3, 1e6))
def test_log_gamma_random_points(x):
    exact = mp_lgamma(x)
    assert abs(log_gamma(x) - exact) <= 5e-14 * max(1.0, abs(exact))


@settings(max_examples=100, deadline=None)
@given(y=st.floats(1.0, 1e7), delta=st.floats(-0.9, 4.0))
def test_log_gamma_shift(y, delta):
    exact = float(mpmath.loggamma(mpmath.mpf(y) + mpmath.mpf(delta)) - mpmath.loggamma(mpmath.mpf(y)))
    assert abs(log_gamma_shift(y, delta) - exact) <= 1e-13 * max(1.0, abs(exact))


def test_gamma_identity_small_m():
    assert k_gamma_identity(5, 3, 4, 0) == pytest.approx(5 / 3, rel=1e-14)
    assert k_gamma_identity(5, 3, 4, 2) == pytest.approx(float(exact_k_product(5, 3, 4, 2)), rel=1e-14)
    assert k_gamma_identity(2, 2, 1, 50) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(PreconditionError):
        k_gamma_identity(1, 2, 3, -1)


@settings(max_examples=40, deadline=None)
@given(
    a=st.fractions(Fraction(1, 2), 8, max_denominator=16),
    b=st.fractions(Fraction(1, 2), 8, max_denominator=16),
    c=st.fractions(Fraction(1, 2), 8, max_denominator=16),
    m=st.integers(0, 3000),
)
def test_gamma_identity_against_exact_product(a, b, c, m):
    exact = exact_k_product(a, b, c, m)
    assert abs(Fraction(k_gamma_identity(a, b, c, m)) - exact) / exact <= 1e-12


def test_motivating_asymptote():
    asy = k_asymptote(5, 3, 4, 1.0)
    assert asy.exponent == 0.5
    expected = math.gamma(0.75) / math.gamma(1.25) * 0.5
    assert asy.constant == pytest.approx(expected, rel=1e-14)
    assert asy.log_constant == pytest.approx(math.log(expected), rel=1e-14)


def test_asymptote_examples():
    flat = k_asymptote(3, 3, 4, 1.0)
    assert flat.exponent == 0 and flat.constant == 1.0
    assert k_asymptote(2, 1, 1, 0.5).constant == pytest.approx(0.5, rel=1e-15)
    assert growth_exponent(1, 5, 2) == -2
    with pytest.raises(PreconditionError):
        k_asymptote(1, 1, 0, 1)


def test_k_tends_to_asymptote_at_scale():
    asy = k_asymptote(5, 3, 4, 1.0)
    ratios = [eval_K(ProductParams(5, 3, 4, math.pi / 2, math.pi / 2, n)).value
              / (asy.constant * n**0.5) for n in (10**3, 10**4, 10**5, 10**6)]
    gaps = np.abs(np.array(ratios) - 1)
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] < 1e-5


def test_upper_bound_is_asymptote_constant():
    assert c_upper_bound(5, 3, 4, 1.0) == k_asymptote(5, 3, 4, 1.0).constant
    with pytest.raises(PreconditionError):
        c_upper_bound(3, 5, 4, 1.0)


def test_exercise_limit_values():
    assert exercise_limit(5, 3, 4, 2) == pytest.approx(math.exp(-0.25))
    assert exercise_limit(5, 3, 4, 3) == pytest.approx(math.exp(-1 / 3))
    with pytest.raises(PreconditionError):
        exercise_limit(5, 3, 4, 1)
