"""Empirical asymptotics: E_n series, extrapolated limits, exponent and rate fits."""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .asymptotics import k_asymptote
from .catalog import FunctionSpec, Kind, to_C
from .errors import FitError, HypothesisViolationError, InvalidParamsError, PreconditionError
from .products import ProductParams, eval_D, eval_E, term_count

Series = Sequence[tuple[int, float]]


class Model(str, enum.Enum):
    INV_LOG = "inv_log"
    INV_N = "inv_n"
    POWER = "power"


MODEL_PARAMS = {Model.INV_LOG: 1, Model.INV_N: 1, Model.POWER: 2}
_BASIS: dict[Model, Callable[[np.ndarray], np.ndarray]] = {
    Model.INV_LOG: lambda n: 1.0 / np.log(n),
    Model.INV_N: lambda n: 1.0 / n,
}
_P_BOUNDS = (0.02, 4.0)
_UNIT_SLACK = 1e-12  # E_n = 1 identically for the identity


@dataclass(frozen=True)
class Schedule:
    n_values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(n) for n in self.n_values)
        if not values or values[0] < 1:
            raise InvalidParamsError("a schedule needs positive n values")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise InvalidParamsError("schedule n values must be strictly increasing")
        object.__setattr__(self, "n_values", values)

    @classmethod
    def geometric(cls, n0: int = 1000, ratio: float = 2.0, count: int = 11) -> "Schedule":
        return cls(tuple(int(round(n0 * ratio**i)) for i in range(count)))

    def __iter__(self):
        return iter(self.n_values)

    def __len__(self):
        return len(self.n_values)


DEFAULT_SCHEDULE = Schedule.geometric()


@dataclass(frozen=True)
class LimitEstimate:
    e_infinity: float
    model: Model
    fit_params: dict
    residual_norm: float
    c_constant: float | None = None
    alternatives: dict = field(default_factory=dict)
    series: tuple[tuple[int, float], ...] = ()
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "e_infinity": self.e_infinity,
            "c_constant": self.c_constant,
            "model": self.model.value,
            "fit_params": dict(self.fit_params),
            "residual_norm": self.residual_norm,
            "alternatives": {k: v for k, v in self.alternatives.items()},
            "warnings": list(self.warnings),
        }


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _check_schedule(template: ProductParams, schedule: Schedule) -> list[ProductParams]:
    params = [template.with_n(n) for n in schedule]
    for p in params:
        if term_count(p) < 0:
            raise InvalidParamsError(f"n={p.n} gives an empty product; start the schedule later")
    return params


def sequence_E(template: ProductParams, schedule: Schedule, H: FunctionSpec,
               threads: int = 1) -> list[tuple[int, float]]:
    """``(n, E_n)`` along the schedule; ``template.n`` is ignored."""
    params = _check_schedule(template, schedule)
    values = _map(lambda p: eval_E(p, H).value, params, threads)
    return [(p.n, v) for p, v in zip(params, values)]


def sequence_log_D(template: ProductParams, schedule: Schedule, h: FunctionSpec,
                   threads: int = 1) -> list[tuple[int, float]]:
    """``(n, log D_n)`` along the schedule."""
    params = _check_schedule(template, schedule)
    values = _map(lambda p: eval_D(p, h).log_value, params, threads)
    return [(p.n, v) for p, v in zip(params, values)]


def _unpack(series: Series, minimum: int) -> tuple[np.ndarray, np.ndarray]:
    if len(series) < minimum:
        raise FitError(f"need at least {minimum} points, got {len(series)}")
    n = np.array([float(s[0]) for s in series])
    v = np.array([float(s[1]) for s in series])
    if not (np.all(np.isfinite(v)) and np.all(n > 1)):
        raise FitError("series must hold finite values at n > 1")
    return n, v


def _linear_fit(X: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, float]:
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise FitError("degenerate design matrix")
    coef, *_ = np.linalg.lstsq(X, v, rcond=None)
    return coef, float(np.linalg.norm(X @ coef - v))


def _power_profile(n: np.ndarray, v: np.ndarray, offset: bool):
    """Fit ``[L +] beta * n**-p``: linear in (L, beta), 1-D search over p."""

    def solve(p):
        cols = [n**-p] if not offset else [np.ones_like(n), n**-p]
        X = np.column_stack(cols)
        coef, *_ = np.linalg.lstsq(X, v, rcond=None)
        return coef, float(np.linalg.norm(X @ coef - v))

    grid = np.geomspace(*_P_BOUNDS, 161)
    res = [solve(p)[1] for p in grid]
    i = int(np.argmin(res))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    p_best, r_best = grid[i], res[i]
    if hi > lo:
        opt = optimize.minimize_scalar(lambda p: solve(p)[1], bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-10})
        if opt.fun <= r_best:
            p_best = float(opt.x)
    coef, resid = solve(p_best)
    return float(p_best), coef, resid


def extrapolate(series: Series, model: Model | str,
                expect_unit_interval: bool = False) -> LimitEstimate:
    """Least-squares fit of ``value ~ L + beta*phi(n)`` and return ``L``.

    ``phi`` is ``1/ln n``, ``1/n``, or ``n**-p`` with ``p`` fitted.  When
    ``expect_unit_interval`` is set, an ``L`` outside ``(0, 1]`` produces a
    warning in the estimate (the estimate itself is not altered).
    """
    model = Model(model)
    n, v = _unpack(series, 4)
    if model is Model.POWER:
        p, coef, resid = _power_profile(n, v, offset=True)
        params = {"L": float(coef[0]), "beta": float(coef[1]), "p": p}
    else:
        X = np.column_stack([np.ones_like(n), _BASIS[model](n)])
        coef, resid = _linear_fit(X, v)
        params = {"L": float(coef[0]), "beta": float(coef[1])}
    notes = []
    L = params["L"]
    if expect_unit_interval and not 0 < L <= 1 + _UNIT_SLACK:
        msg = f"extrapolated limit {L!r} lies outside (0, 1]"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    return LimitEstimate(L, model, params, resid, warnings=tuple(notes))


def fit_growth_exponent(series: Series, min_decades: float = 2.0) -> float:
    """Least-squares slope of ``log D_n`` against ``ln n``."""
    n, logd = _unpack(series, 4)
    if math.log10(n.max() / n.min()) < min_decades - 1e-9:
        raise FitError(f"schedule spans less than {min_decades} decades in n")
    slope, _ = np.polyfit(np.log(n), logd, 1)
    return float(slope)


def estimate_C(a, b, c, eps, h: FunctionSpec, schedule: Schedule = DEFAULT_SCHEDULE,
               threads: int = 1, check_hypotheses: bool = True,
               compat_override: bool = False) -> LimitEstimate:
    """Estimate ``lim E_n`` and the constant C in ``D_n ~ C n^((a-b)/c)``, with ``d = 1``.

    For an S-function ``h`` the series is built from ``H = h(x)/x`` and
    ``C = lim E_n * (K_n asymptote constant)``.  For a C-function the product
    itself converges, so C is the limit.  The reported model is whichever of
    ``inv_log``/``inv_n`` leaves the smaller residual.
    """
    from .lemmas import check_logconcavity

    if a == b:
        raise PreconditionError("estimate_C needs a != b")
    if h.kind in (Kind.S, Kind.IDENTITY):
        H = to_C(h)
        k_const = k_asymptote(a, b, c, eps).constant
    elif h.kind in (Kind.C, Kind.CONSTANT_ONE):
        H = h
        k_const = 1.0
    else:  # pragma: no cover
        raise PreconditionError(f"unsupported kind {h.kind}")
    if check_hypotheses:
        report = check_logconcavity(H, eps)
        if not report.passed:
            raise HypothesisViolationError(
                f"{H.name} is not positive and concave on [0, {eps!r}]: {report.first_violation}"
            )
    template = ProductParams(a, b, c, 1, eps, schedule.n_values[0], compat_override=compat_override)
    series = sequence_E(template, schedule, H, threads)
    best = select_limit(series, expect_unit_interval=a > b)
    return LimitEstimate(
        best.e_infinity, best.model, best.fit_params, best.residual_norm,
        c_constant=best.e_infinity * k_const, alternatives=best.alternatives,
        series=tuple(series), warnings=best.warnings,
    )


def select_limit(series: Series, expect_unit_interval: bool = False) -> LimitEstimate:
    """Extrapolate under ``inv_log`` and ``inv_n`` and keep the smaller residual."""
    fits = {m: extrapolate(series, m, expect_unit_interval) for m in (Model.INV_LOG, Model.INV_N)}
    best = min(fits.values(), key=lambda e: e.residual_norm)
    return LimitEstimate(
        best.e_infinity, best.model, best.fit_params, best.residual_norm,
        alternatives={m.value: e.e_infinity for m, e in fits.items()},
        series=tuple((int(n), float(v)) for n, v in series), warnings=best.warnings,
    )


@dataclass(frozen=True)
class ModelFit:
    model: Model
    params: dict
    residual: float
    fitted: tuple[float, ...]


@dataclass(frozen=True)
class ConvergenceReport:
    e_infinity: float
    fits: dict  # Model -> ModelFit
    ranking: tuple[Model, ...]
    limit_by_model: dict  # Model -> extrapolated L
    pairwise_agreement: dict  # "m1|m2" -> |L1 - L2|
    zero_variation: bool
    weighting: str = "unweighted least squares"

    def to_dict(self) -> dict:
        return {
            "e_infinity": self.e_infinity,
            "weighting": self.weighting,
            "zero_variation": self.zero_variation,
            "ranking": [m.value for m in self.ranking],
            "models": {
                m.value: {"params": dict(f.params), "residual": f.residual, "n_params": MODEL_PARAMS[m]}
                for m, f in self.fits.items()
            },
            "limit_by_model": {m.value: v for m, v in self.limit_by_model.items()},
            "pairwise_agreement": dict(self.pairwise_agreement),
        }


def _rank(fits: dict, scale: float) -> tuple[Model, ...]:
    # residuals within this band are a tie, settled in favour of fewer parameters
    best = min(f.residual for f in fits.values())
    band = best + 1e-9 * scale
    tied = sorted((m for m, f in fits.items() if f.residual <= band),
                  key=lambda m: (MODEL_PARAMS[m], fits[m].residual))
    rest = sorted((m for m, f in fits.items() if f.residual > band), key=lambda m: fits[m].residual)
    return tuple(tied + rest)


def fit_convergence_rate(series: Series, e_infinity: float) -> ConvergenceReport:
    """Fit ``|E_n - e_infinity|`` by ``beta/ln n``, ``beta/n`` and ``beta*n**-p`` and rank them.

    The ranking is a report, not a verdict on the slow-convergence conjecture.
    """
    n, v = _unpack(series, 6)
    r = np.abs(v - e_infinity)
    scale = float(np.linalg.norm(r))
    zero_variation = scale <= 1e-14 * max(1.0, abs(e_infinity)) * math.sqrt(len(r))

    fits = {}
    for model in (Model.INV_LOG, Model.INV_N):
        phi = _BASIS[model](n)
        if zero_variation:
            beta, resid = 0.0, 0.0
        else:
            beta = float(phi @ r / (phi @ phi))
            resid = float(np.linalg.norm(beta * phi - r))
        fits[model] = ModelFit(model, {"beta": beta}, resid, tuple(beta * phi))
    if zero_variation:
        fits[Model.POWER] = ModelFit(Model.POWER, {"beta": 0.0, "p": float("nan")}, 0.0,
                                     tuple(np.zeros_like(n)))
    else:
        p, coef, resid = _power_profile(n, r, offset=False)
        fits[Model.POWER] = ModelFit(Model.POWER, {"beta": float(coef[0]), "p": p}, resid,
                                     tuple(float(coef[0]) * n**-p))

    ranking = tuple(fits) if zero_variation else _rank(fits, scale)
    limits = {}
    for model in Model:
        try:
            limits[model] = extrapolate(series, model).e_infinity
        except FitError:
            limits[model] = float("nan")
    models = list(Model)
    pairwise = {
        f"{m1.value}|{m2.value}": abs(limits[m1] - limits[m2])
        for i, m1 in enumerate(models) for m2 in models[i + 1:]
    }
    return ConvergenceReport(float(e_infinity), fits, ranking, limits, pairwise, bool(zero_variation))
