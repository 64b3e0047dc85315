from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymprod import catalog as cat
from asymprod.asymptotics import c_upper_bound
from asymprod.errors import FitError, HypothesisViolationError, InvalidParamsError, PreconditionError
from asymprod.limits import (
    DEFAULT_SCHEDULE,
    Model,
    Schedule,
    estimate_C,
    extrapolate,
    fit_convergence_rate,
    fit_growth_exponent,
    select_limit,
    sequence_E,
    sequence_log_D,
)
from asymprod.products import ProductParams

NS = list(DEFAULT_SCHEDULE)


def synthetic(f):
    return [(n, f(n)) for n in NS]


def test_schedule():
    assert Schedule.geometric(1000, 2, 3).n_values == (1000, 2000, 4000)
    assert len(DEFAULT_SCHEDULE) == 11 and DEFAULT_SCHEDULE.n_values[-1] == 1024000
    with pytest.raises(InvalidParamsError):
        Schedule((10, 10))
    with pytest.raises(InvalidParamsError):
        Schedule(())


@pytest.mark.parametrize("model,phi", [
    (Model.INV_LOG, lambda n: 1 / math.log(n)),
    (Model.INV_N, lambda n: 1 / n),
])
def test_linear_models_recover_limit(model, phi):
    est = extrapolate(synthetic(lambda n: 0.6 + 2 * phi(n)), model)
    assert est.e_infinity == pytest.approx(0.6, abs=1e-12)
    assert est.fit_params["beta"] == pytest.approx(2, rel=1e-9)
    assert est.residual_norm < 1e-12


def test_power_model_recovers_exponent():
    est = extrapolate(synthetic(lambda n: 0.3 - 1.5 * n**-0.7), Model.POWER)
    assert est.e_infinity == pytest.approx(0.3, abs=1e-7)
    assert est.fit_params["p"] == pytest.approx(0.7, rel=1e-4)


def test_extrapolate_needs_points():
    with pytest.raises(FitError):
        extrapolate([(10, 1.0), (20, 0.9), (40, 0.8)], "inv_n")


def test_unit_interval_warning():
    series = synthetic(lambda n: 1.2 + 1 / n)
    with pytest.warns(RuntimeWarning):
        est = extrapolate(series, Model.INV_N, expect_unit_interval=True)
    assert est.warnings
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        extrapolate(synthetic(lambda n: 1.0 + 0 * n), Model.INV_N, expect_unit_interval=True)


def test_growth_exponent_on_power_law():
    assert fit_growth_exponent(synthetic(lambda n: 0.25 * math.log(n) + 3)) == pytest.approx(0.25)
    with pytest.raises(FitError):
        fit_growth_exponent([(n, 1.0) for n in (100, 200, 400, 800)])


def test_sequences_are_thread_invariant():
    p = ProductParams(5, 3, 4, 1, math.pi / 2, 1000)
    H = cat.to_C(cat.get("sin"))
    sched = Schedule.geometric(1000, 2, 6)
    assert sequence_E(p, sched, H, threads=1) == sequence_E(p, sched, H, threads=4)
    assert sequence_log_D(p, sched, cat.get("sin"), 1) == sequence_log_D(p, sched, cat.get("sin"), 3)


def test_sequences_reject_empty_products():
    p = ProductParams(5, 3, 4, 1, 1.0, 1)
    with pytest.raises(InvalidParamsError):
        sequence_E(p, Schedule((2, 4, 8)), cat.get("one"))


def test_identity_limit_is_one():
    est = estimate_C(5, 3, 4, math.pi / 2, cat.get("identity"))
    assert est.e_infinity == 1.0
    assert est.c_constant == pytest.approx(c_upper_bound(5, 3, 4, math.pi / 2), rel=1e-15)


@pytest.mark.parametrize("name", cat.S_FUNCTIONS)
def test_limit_of_e_matches_riemann_sum_oracle(name):
    # log E_n is a Riemann sum for ((a-b)/c) * int_0^eps (log H)'; so E_n -> (H(eps)/H(0))^((a-b)/c)
    h = cat.get(name)
    H = cat.to_C(h)
    eps = cat.find_epsilon(H, 4)
    oracle = (H.eval(eps) / H.eval(0.0)) ** 0.5
    est = estimate_C(5, 3, 4, eps, h)
    assert est.e_infinity == pytest.approx(oracle, rel=2e-5)
    assert est.model is Model.INV_N


def test_exercise_limit_through_estimator():
    est = estimate_C(5, 3, 4, 1 / math.sqrt(2), cat.get("exp_neg_x2"))
    assert est.c_constant == est.e_infinity
    # the 1/n coefficient oscillates with frac(n*eps/c), which caps the fit at ~1e-5
    assert est.e_infinity == pytest.approx(math.exp(-0.25), rel=1e-4)


def test_estimate_checks_hypotheses():
    with pytest.raises(HypothesisViolationError):
        estimate_C(5, 3, 4, 1.1 / math.sqrt(2), cat.get("exp_neg_x2"))
    with pytest.raises(PreconditionError):
        estimate_C(3, 3, 4, 1.0, cat.get("sin"))


def test_select_limit_prefers_smaller_residual():
    series = synthetic(lambda n: 0.7 + 3 / n)
    est = select_limit(series)
    assert est.model is Model.INV_N
    assert set(est.alternatives) == {"inv_log", "inv_n"}
    d = est.to_dict()
    assert d["model"] == "inv_n" and d["e_infinity"] == pytest.approx(0.7)


@pytest.mark.parametrize("model,f", [
    (Model.INV_LOG, lambda n: 0.5 + 0.4 / math.log(n)),
    (Model.INV_N, lambda n: 0.5 + 40 / n),
    (Model.POWER, lambda n: 0.5 + 0.4 * n**-0.5),
])
def test_convergence_ranking_identifies_generator(model, f):
    report = fit_convergence_rate(synthetic(f), 0.5)
    assert report.ranking[0] is model
    assert not report.zero_variation
    assert set(report.to_dict()["models"]) == {"inv_log", "inv_n", "power"}


def test_convergence_constant_series_is_degenerate():
    report = fit_convergence_rate(synthetic(lambda n: 0.8), 0.8)
    assert report.zero_variation
    assert all(f.residual == 0 for f in report.fits.values())


def test_convergence_needs_six_points():
    with pytest.raises(FitError):
        fit_convergence_rate(synthetic(lambda n: 1 / n)[:5], 0.0)


@settings(max_examples=30, deadline=None)
@given(L=st.floats(0.05, 0.95), beta=st.floats(-5, 5))
def test_inv_n_fit_is_exact_on_its_own_family(L, beta):
    est = extrapolate(synthetic(lambda n: L + beta / n), Model.INV_N)
    assert est.e_infinity == pytest.approx(L, abs=1e-10)
