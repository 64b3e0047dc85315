from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from asymprod import catalog as cat
from asymprod.errors import (
    HypothesisViolationError,
    InvalidParamsError,
    KindMismatchError,
    PreconditionError,
    ResourceLimitError,
    UnsupportedInputError,
)
from asymprod.products import (
    ProductParams,
    eval_D,
    eval_E,
    eval_K,
    eval_K_exact,
    exact_k_product,
    term_count,
)

HALF_PI = math.pi / 2


def motivating(n):
    return ProductParams(5, 3, 4, HALF_PI, HALF_PI, n)


def test_term_count_motivating_case():
    # m = floor(n/4 - 5/4)
    assert [term_count(motivating(n)) for n in (4, 5, 8, 9, 1000)] == [-1, 0, 0, 1, 248]


def test_term_count_absorbs_rounding_at_integer_boundaries():
    # 3*0.7/0.3 - 0.6/0.3 is exactly 5 but evaluates to 4.999999999999999
    p = ProductParams(0.6, 0.6, 0.3, 1, 0.7, 3, compat_override=True)
    assert 3 * 0.7 / 0.3 - 0.6 / 0.3 < 5
    assert term_count(p) == 5


def test_params_validation():
    with pytest.raises(InvalidParamsError):
        ProductParams(0, 1, 1, 1, 1, 1)
    with pytest.raises(InvalidParamsError):
        ProductParams(1, 1, 1, 1, 1, 0)
    with pytest.raises(InvalidParamsError):
        ProductParams(1, 1, 1, 1, 1, True)
    with pytest.raises(InvalidParamsError):
        ProductParams(1, 1, 1, 1, 2, 5)  # eps > c*d
    with pytest.raises(InvalidParamsError):
        ProductParams(1, 1, 1, 1, 1, 5)  # eps = c*d = 1
    ProductParams(1, 1, 2, 1, 2, 5)  # eps = c*d = 2 > 1 is allowed
    ProductParams(1, 1, 1, 1, 2, 5, compat_override=True)


def test_motivating_value_at_n8():
    # one factor: sin(5 pi/16) / sin(3 pi/16)
    d = eval_D(motivating(8), cat.get("sin"))
    assert d.m == 0
    assert d.value == pytest.approx(math.sin(5 * math.pi / 16) / math.sin(3 * math.pi / 16), rel=1e-15)
    assert d.value == pytest.approx(1.496606, abs=5e-7)


def test_empty_product_is_one():
    p = motivating(4)
    for value in (eval_D(p, cat.get("sin")), eval_K(p)):
        assert value.m == -1 and value.terms == 0 and value.value == 1.0


def test_identity_gives_k():
    p = motivating(1000)
    assert eval_D(p, cat.get("identity")).log_value == eval_K(p).log_value


def test_equal_shifts_give_one():
    p = ProductParams(3, 3, 4, 1, 1, 500)
    assert eval_D(p, cat.get("tanh")).value == 1.0
    assert eval_K(p).value == 1.0


def test_e_matches_d_over_k_for_unit_scale():
    p = ProductParams(5, 3, 4, 1, HALF_PI, 2000)
    e = eval_E(p, cat.to_C(cat.get("sin")))
    d, k = eval_D(p, cat.get("sin")), eval_K(p)
    assert e.log_value == pytest.approx(d.log_value - k.log_value, abs=1e-12)


def test_e_requires_unit_scale_and_c_kind():
    with pytest.raises(PreconditionError):
        eval_E(motivating(100), cat.to_C(cat.get("sin")))
    with pytest.raises(KindMismatchError):
        eval_E(ProductParams(5, 3, 4, 1, 1, 100), cat.get("sin"))
    one = eval_E(ProductParams(5, 3, 4, 1, 1, 100), cat.get("one"))
    assert one.value == 1.0


def test_nonpositive_values_are_hypothesis_violations():
    p = ProductParams(5, 3, 4, 1, 3.5, 100)
    with pytest.raises(HypothesisViolationError):
        eval_D(p, cat.get("cos"))


def test_compensated_sum_reports_its_correction():
    v = eval_D(ProductParams(5, 3, 4, 1, HALF_PI, 10**6), cat.get("sin"))
    assert 0 <= v.comp_error_bound < 1e-9


def test_exact_k_small_case():
    # (5/3)(9/7)(13/11)
    assert exact_k_product(5, 3, 4, 2) == Fraction(5 * 9 * 13, 3 * 7 * 11)
    assert exact_k_product(Fraction(1, 2), Fraction(3, 2), Fraction(1, 3), -1) == 1


def test_exact_k_matches_float_path():
    p = ProductParams(5, 3, 4, 1, 1, 4000)
    assert float(eval_K_exact(p)) == pytest.approx(eval_K(p).value, rel=1e-12)


def test_exact_k_input_and_size_guards():
    with pytest.raises(UnsupportedInputError):
        exact_k_product(0.5, 1, 1, 3)
    with pytest.raises(ResourceLimitError):
        exact_k_product(1, 2, 3, 11, cap=10)


@settings(max_examples=60, deadline=None)
@given(
    a=st.floats(0.5, 8), b=st.floats(0.5, 8), c=st.floats(0.5, 8),
    frac=st.floats(0.05, 0.99), n=st.integers(1, 5000),
    name=st.sampled_from(["sin", "arctan", "tanh", "asinh", "erf", "cos", "sech", "exp_neg_x2"]),
)
def test_swapping_shifts_inverts_the_product(a, b, c, frac, n, name):
    f = cat.get(name)
    eps = frac * min(c, 0.99 * min(f.domain_radius, math.pi / 2 if name == "cos" else 50))
    p, q = ProductParams(a, b, c, 1, eps, n), ProductParams(b, a, c, 1, eps, n)
    assert term_count(p) == term_count(q)
    assert abs(eval_D(p, f).log_value + eval_D(q, f).log_value) <= 1e-12 * (term_count(p) + 2)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 10**6), c=st.floats(0.5, 8), a=st.floats(0.5, 8), b=st.floats(0.5, 8))
def test_term_count_bounds_arguments(n, c, a, b):
    eps = 0.9 * c
    p = ProductParams(a, b, c, 1, eps, n)
    m = term_count(p)
    assume(m >= 0)
    tol = 1e-9 * max(1.0, eps)
    assert (c * m + max(a, b)) / n <= eps + tol
    assert (c * (m + 1) + max(a, b)) / n > eps - tol


@settings(max_examples=40, deadline=None)
@given(n=st.integers(200, 20000))
def test_concave_quotient_factors_are_below_one(n):
    # a > b and H decreasing: each factor, hence E_n, lies in (0, 1]
    p = ProductParams(5, 3, 4, 1, HALF_PI, n)
    e = eval_E(p, cat.to_C(cat.get("sin"))).value
    assert 0 < e <= 1
