"""Machine checks of the lemmas and hypotheses behind the asymptotic theorems.

All checks work with ``d = 1`` and a C-function ``H``.  Non-strict
inequalities get an absolute slack of ``1e-12``; every report carries the
smallest slack seen so tight cases stay visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .asymptotics import c_upper_bound
from .catalog import FunctionSpec
from .errors import HypothesisViolationError, PreconditionError
from .limits import LimitEstimate
from .products import ProductParams, eval_E, term_count

SLACK = 1e-12
H2_TOL = 1e-10
UPPER_RTOL = 1e-9


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    margin: float
    first_violation: dict | None = None
    n_range: tuple[int, int] | None = None
    j_range: tuple[int, int] | None = None
    out_of_scope: tuple[int, ...] = ()
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "margin": self.margin,
            "first_violation": self.first_violation,
            "n_range": list(self.n_range) if self.n_range else None,
            "j_range": list(self.j_range) if self.j_range else None,
            "out_of_scope": list(self.out_of_scope),
            "details": dict(self.details),
        }


@dataclass(frozen=True)
class BoundWitness:
    """Grid maximum of ``g(x, y) = (1 - H((y+delta)x)/H(yx))/x``.

    ``a_final`` rescales ``a_delta`` so that ``1 - a_final/m`` bounds each
    E_n factor from below: since ``m/n <= eps/c``, ``a_final = a_delta*eps/c``
    gives ``a_final/m >= a_delta/n``.
    """

    a_delta: float
    a_final: float
    grid_spec: dict
    max_location: tuple[float, float]
    delta: float
    alpha: float
    eps: float


def _positive(H: FunctionSpec, x: np.ndarray) -> np.ndarray:
    v = np.asarray(H.eval(x), dtype=float)
    bad = ~(np.isfinite(v) & (v > 0))
    if bad.any():
        xb = np.asarray(x)[bad].reshape(-1)[0]
        raise HypothesisViolationError(f"{H.name} is not positive at x={xb!r}")
    return v


def compute_bound_witness(H: FunctionSpec, delta: float, alpha: float, eps: float, c: float,
                          grid: int = 512, x_min_ratio: float = 1e-6) -> BoundWitness:
    """Maximise ``g`` over ``x > 0``, ``y >= alpha``, ``yx <= eps``.

    ``x`` is log-spaced on ``[x_min_ratio*eps/alpha, eps/alpha]`` plus the
    limit point ``x = 0`` where ``g = 0``; ``y`` is uniform on
    ``[alpha, eps/x]``, trimmed so ``(y+delta)x`` stays inside the domain of ``H``.
    """
    if delta < 0 or not alpha > 0 or not eps > 0:
        raise PreconditionError("need delta >= 0, alpha > 0, eps > 0")
    x_max = eps / alpha
    xs = np.geomspace(x_min_ratio * x_max, x_max, grid)
    y_hi = np.minimum(eps / xs, H.domain_radius / xs - delta)
    keep = y_hi >= alpha
    xs, y_hi = xs[keep], y_hi[keep]
    s = np.linspace(0.0, 1.0, grid)
    Y = alpha + (y_hi - alpha)[:, None] * s[None, :]
    X = np.broadcast_to(xs[:, None], Y.shape)
    base = _positive(H, Y * X)
    shifted = _positive(H, (Y + delta) * X)
    g = (1.0 - shifted / base) / X
    i, j = np.unravel_index(int(np.argmax(g)), g.shape)
    best = float(g[i, j])
    if best > 0:
        a_delta, loc = best, (float(X[i, j]), float(Y[i, j]))
    else:
        a_delta, loc = 0.0, (0.0, float(alpha))
    spec = {"x": "log", "y": "uniform", "resolution": [int(grid), int(grid)],
            "x_range": [float(xs[0]) if len(xs) else 0.0, float(x_max)], "includes_x0": True}
    return BoundWitness(a_delta, a_delta * eps / c, spec, loc, float(delta), float(alpha), float(eps))


def check_lower_bound(p: ProductParams, H: FunctionSpec, witness: BoundWitness) -> CheckReport:
    """Every factor ``H((cj+a)/n)/H((cj+b)/n)`` is at least ``1 - A/m`` at this n."""
    if p.d != 1:
        raise PreconditionError("lemma checks use d = 1")
    a, b, c, eps = float(p.a), float(p.b), float(p.c), float(p.eps)
    if not (math.isclose(witness.delta, a - b, abs_tol=1e-15) and witness.alpha == b
            and witness.eps == eps):
        raise PreconditionError("witness was computed for different (delta, alpha, eps)")
    n, m = p.n, term_count(p)
    if m < 1 or m / n < eps / (2 * c):
        return CheckReport("lower_bound", True, math.inf, n_range=(n, n), out_of_scope=(n,),
                           details={"m": m, "reason": "n below the large-n threshold"})
    j = np.arange(m + 1, dtype=float)
    ratio = _positive(H, (c * j + a) / n) / _positive(H, (c * j + b) / n)
    rhs = 1.0 - witness.a_final / m
    slack = ratio - rhs
    bad = slack < -SLACK
    violation = None
    if bad.any():
        k = int(np.argmax(bad))
        violation = {"n": n, "j": k, "lhs": float(ratio[k]), "rhs": rhs}
    return CheckReport("lower_bound", violation is None, float(slack.min()), violation,
                       n_range=(n, n), j_range=(0, m),
                       details={"m": m, "A": witness.a_final, "a_delta": witness.a_delta})


def check_term_monotonicity(p: ProductParams, H: FunctionSpec, n_range: Iterable[int]) -> CheckReport:
    """``H((cj+a)/n)/H((cj+b)/n) >= H((c(j+1)+a)/(n+1))/H((c(j+1)+b)/(n+1))`` for j <= m(n)."""
    if p.d != 1:
        raise PreconditionError("lemma checks use d = 1")
    a, b, c = float(p.a), float(p.b), float(p.c)
    if a < b:
        raise PreconditionError("term monotonicity is stated for a >= b")
    ns = list(n_range)
    margin, violation, skipped, jmax = math.inf, None, [], 0
    for n in ns:
        m = term_count(p.with_n(n))
        if m < 0 or (n - m) * c - a <= 0:
            skipped.append(n)
            continue
        j = np.arange(m + 1, dtype=float)
        lhs = _positive(H, (c * j + a) / n) / _positive(H, (c * j + b) / n)
        rhs = _positive(H, (c * (j + 1) + a) / (n + 1)) / _positive(H, (c * (j + 1) + b) / (n + 1))
        slack = lhs - rhs
        margin = min(margin, float(slack.min()))
        jmax = max(jmax, m)
        bad = slack < -SLACK
        if violation is None and bad.any():
            k = int(np.argmax(bad))
            violation = {"n": n, "j": k, "lhs": float(lhs[k]), "rhs": float(rhs[k])}
    n_span = (min(ns), max(ns)) if ns else None
    return CheckReport("term_monotonicity", violation is None, margin, violation,
                       n_range=n_span, j_range=(0, jmax), out_of_scope=tuple(skipped))


def consecutive_E(template: ProductParams, H: FunctionSpec, n_start: int, n_stop: int
                  ) -> list[tuple[int, float]]:
    """``(n, E_n)`` for every integer n in ``[n_start, n_stop]``."""
    return [(n, eval_E(template.with_n(n), H).value) for n in range(n_start, n_stop + 1)]


def check_E_monotone(series: Sequence[tuple[int, float]], rtol: float = SLACK) -> CheckReport:
    """Each value is at most the previous one, up to a relative ``rtol``."""
    values = [float(v) for _, v in series]
    margin, violation = math.inf, None
    for i in range(1, len(values)):
        allowed = values[i - 1] * (1.0 + rtol)
        margin = min(margin, allowed - values[i])
        if violation is None and values[i] > allowed:
            violation = {"index": i, "n": int(series[i][0]), "lhs": values[i], "rhs": values[i - 1]}
    ns = [int(s[0]) for s in series]
    count = sum(1 for i in range(1, len(values)) if values[i] > values[i - 1] * (1.0 + rtol))
    return CheckReport("E_monotone", violation is None, margin, violation,
                       n_range=(min(ns), max(ns)) if ns else None,
                       details={"increases": count, "pairs": max(len(values) - 1, 0)})


def check_logconcavity(H: FunctionSpec, eps: float, grid: int = 1000) -> CheckReport:
    """``H > 0`` and ``H'' <= 1e-10`` on a uniform grid of ``[0, eps]``."""
    x = np.linspace(0.0, float(eps), grid)
    hv = np.asarray(H.eval(x), dtype=float)
    h2 = np.asarray(H.d2(x), dtype=float)
    slack = np.minimum(hv, H2_TOL - h2)
    slack = np.where(np.isfinite(slack), slack, -math.inf)
    bad = slack < 0
    violation = None
    if bad.any():
        k = int(np.argmax(bad))
        violation = {"x": float(x[k]), "H": float(hv[k]), "H2": float(h2[k])}
    return CheckReport("logconcavity", violation is None, float(slack.min()), violation,
                       details={"eps": float(eps), "points": int(grid)})


def check_upper_bound(est: LimitEstimate, a, b, c, eps) -> CheckReport:
    if not a > b:
        raise PreconditionError("the upper bound is stated for a > b")
    bound = c_upper_bound(a, b, c, eps)
    allowed = bound * (1.0 + UPPER_RTOL)
    value = float(est.c_constant)
    violation = None if value <= allowed else {"c_constant": value, "bound": bound}
    return CheckReport("upper_bound", violation is None, allowed - value, violation,
                       details={"c_constant": value, "bound": bound})
