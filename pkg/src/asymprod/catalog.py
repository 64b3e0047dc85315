"""Catalog of S-functions and C-functions, with classifiers and combinators.

An S-function behaves like ``sin`` near the origin (``h(0) = h''(0) = 0``,
``h'(0) > 0``, ``h'' <= 0`` just right of 0); a C-function behaves like
``cos`` (``H(0) > 0``, ``H'(0) = 0``, ``H'' <= 0`` just right of 0).  ``h`` is
an S-function exactly when ``h(x)/x`` is a C-function.

Every evaluator in this module accepts scalars or numpy arrays and returns
the same shape (a Python float for scalar input).
"""

from __future__ import annotations

import enum
import functools
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np
from scipy import special

from .errors import (
    ClosureViolationError,
    EvaluationDomainError,
    KindMismatchError,
    NoValidEpsilonError,
    PreconditionError,
)

ArrayFn = Callable[..., "np.ndarray | float"]

_U = float(np.finfo(float).eps)
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_GL_T = 0.5 * (_GL_NODES + 1.0)
_GL_W = 0.5 * _GL_WEIGHTS
# below this argument the h/x derivative formulas cancel badly
_QUOTIENT_SWITCH = 0.5
_QUOTIENT_TINY = 1e-100
_H2_SLACK = 1e-12
_VERIFY_H2 = 1e-10


class Kind(enum.Enum):
    S = "S"
    C = "C"
    IDENTITY = "Identity"
    CONSTANT_ONE = "ConstantOne"


class FunctionClass(enum.Enum):
    S = "S"
    C = "C"
    NEITHER = "Neither"


_S_LIKE = (Kind.S, Kind.IDENTITY)
_C_LIKE = (Kind.C, Kind.CONSTANT_ONE)


def vectorized(fn: Callable[[np.ndarray], np.ndarray]) -> ArrayFn:
    """Lift an array-to-array function so scalars go in and come out as floats."""

    @functools.wraps(fn)
    def wrapper(x):
        arr = np.asarray(x, dtype=float)
        out = np.asarray(fn(np.atleast_1d(arr)), dtype=float)
        if arr.ndim == 0:
            return float(out.reshape(-1)[0])
        return out.reshape(arr.shape)

    return wrapper


@dataclass(frozen=True)
class TaylorSignature:
    """Leading behaviour ``alpha*(x - lam*x**k)`` (S) or ``alpha*(1 - lam*x**k)`` (C)."""

    alpha: float
    lam: float
    k: int

    def __post_init__(self):
        if not (self.alpha > 0 and self.lam > 0):
            raise ValueError("Taylor signature needs alpha > 0 and lam > 0")
        if int(self.k) != self.k or self.k < 2:
            raise ValueError("Taylor order k must be an integer >= 2")

    def truncation(self, x, kind: Kind):
        x = np.asarray(x, dtype=float)
        if kind in _S_LIKE:
            return self.alpha * (x - self.lam * x**self.k)
        return self.alpha * (1.0 - self.lam * x**self.k)


def _numeric_derivative(f: ArrayFn, order: int) -> ArrayFn:
    # u^(1/3) is the optimal relative step for first differences, u^(1/4) for second
    root = _U ** (1.0 / 3.0) if order == 1 else _U**0.25

    @vectorized
    def deriv(x):
        h = root * np.maximum(np.abs(x), 1.0)
        central = x >= 2.0 * h
        out = np.empty_like(x)
        xc, hc = x[central], h[central]
        xf, hf = x[~central], h[~central]
        if order == 1:
            out[central] = (f(xc + hc) - f(xc - hc)) / (2.0 * hc)
            out[~central] = (-3.0 * f(xf) + 4.0 * f(xf + hf) - f(xf + 2 * hf)) / (2.0 * hf)
        else:
            out[central] = (f(xc + hc) - 2.0 * f(xc) + f(xc - hc)) / hc**2
            out[~central] = (
                2.0 * f(xf) - 5.0 * f(xf + hf) + 4.0 * f(xf + 2 * hf) - f(xf + 3 * hf)
            ) / hf**2
        return out

    return deriv


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """A catalogued function together with what the theory needs to know about it.

    ``d1``/``d2`` default to finite-difference fallbacks when not given in
    closed form.  ``d3`` is optional and only used to build a cancellation-free
    ``h(x)/x`` near the origin.  ``quotient`` may hold a precomputed C-spec for
    ``h(x)/x`` when one is known algebraically.  ``listed_only`` marks entries
    kept because they are commonly listed as examples even though they do
    not classify as their claimed kind.
    """

    name: str
    kind: Kind
    eval: ArrayFn
    d1: ArrayFn | None = None
    d2: ArrayFn | None = None
    d3: ArrayFn | None = None
    taylor: TaylorSignature | None = None
    closed_form_epsilon: float | None = None
    domain_radius: float = 1.0
    quotient: "FunctionSpec | None" = None
    listed_only: bool = False
    numeric_derivatives: bool = field(init=False, default=False)

    def __post_init__(self):
        if not self.domain_radius > 0:
            raise ValueError("domain_radius must be positive")
        numeric = self.d1 is None or self.d2 is None
        object.__setattr__(self, "numeric_derivatives", numeric)
        if self.d1 is None:
            object.__setattr__(self, "d1", _numeric_derivative(self.eval, 1))
        if self.d2 is None:
            object.__setattr__(self, "d2", _numeric_derivative(self.eval, 2))

    def __call__(self, x):
        return self.eval(x)

    def __repr__(self):
        return f"FunctionSpec({self.name!r}, kind={self.kind.value})"

    def derivative_noise(self, order: int) -> float:
        """Relative noise floor of ``d1``/``d2``; zero for closed forms."""
        if not self.numeric_derivatives:
            return 0.0
        return 10.0 * (_U ** (2.0 / 3.0) if order == 1 else _U**0.5)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ClassifyReport:
    verdict: FunctionClass
    s_failures: tuple[str, ...]
    c_failures: tuple[str, ...]


def _finite(values, what: str, where) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        bad = np.atleast_1d(where)[~np.isfinite(np.atleast_1d(values))]
        raise EvaluationDomainError(f"{what} is not finite at x={bad[0]!r}")
    return values


def classify(
    f: FunctionSpec, probe_radius: float = 0.1, tol: float = 1e-9, depth: int = 30
) -> ClassifyReport:
    """Decide numerically whether ``f`` is an S-function, a C-function, or neither.

    Conditions are checked at 0 and on the geometric grid
    ``probe_radius * 2**-i`` for ``i < depth``.  The identity counts as S and
    the constant 1 counts as C.
    """
    if probe_radius > f.domain_radius:
        raise PreconditionError(
            f"probe_radius {probe_radius} exceeds domain radius {f.domain_radius}"
        )
    grid = probe_radius * 0.5 ** np.arange(depth)
    f0 = _finite(f.eval(0.0), "f", 0.0)
    d10 = _finite(f.d1(0.0), "f'", 0.0)
    d20 = _finite(f.d2(0.0), "f''", 0.0)
    _finite(f.eval(grid), "f", grid)
    d2g = _finite(f.d2(grid), "f''", grid)

    scale = max(1.0, abs(float(f0)))
    tol1 = tol + f.derivative_noise(1) * scale
    tol2 = tol + f.derivative_noise(2) * scale

    concave_fail = []
    above = d2g > tol2
    if np.any(above):
        x_bad = grid[above]
        concave_fail.append(
            f"f'' > {tol2:.3g} at {int(above.sum())} probe points (largest x={x_bad.max():.6g})"
        )

    s_fail = list(concave_fail)
    if abs(f0) > tol:
        s_fail.insert(0, f"f(0)={f0:.6g} is not 0")
    if abs(d20) > tol2:
        s_fail.insert(0, f"f''(0)={d20:.6g} is not 0")
    if not d10 > tol1:
        s_fail.insert(0, f"f'(0)={d10:.6g} is not positive")

    c_fail = list(concave_fail)
    if not f0 > tol:
        c_fail.insert(0, f"f(0)={f0:.6g} is not positive")
    if abs(d10) > tol1:
        c_fail.insert(0, f"f'(0)={d10:.6g} is not 0")

    if not s_fail:
        verdict = FunctionClass.S
    elif not c_fail:
        verdict = FunctionClass.C
    else:
        verdict = FunctionClass.NEITHER
    return ClassifyReport(verdict, tuple(s_fail), tuple(c_fail))


# ---------------------------------------------------------------------------
# the catalog


def _sin_spec() -> FunctionSpec:
    return FunctionSpec(
        "sin", Kind.S, vectorized(np.sin), vectorized(np.cos),
        vectorized(lambda x: -np.sin(x)), vectorized(lambda x: -np.cos(x)),
        taylor=TaylorSignature(1.0, 1 / 6, 3), closed_form_epsilon=math.pi / 2,
        domain_radius=math.pi,
    )


def _arctan_spec() -> FunctionSpec:
    return FunctionSpec(
        "arctan", Kind.S, vectorized(np.arctan),
        vectorized(lambda x: 1.0 / (1.0 + x * x)),
        vectorized(lambda x: -2.0 * x / (1.0 + x * x) ** 2),
        vectorized(lambda x: (6.0 * x * x - 2.0) / (1.0 + x * x) ** 3),
        taylor=TaylorSignature(1.0, 1 / 3, 3), domain_radius=10.0,
    )


def _tanh_spec() -> FunctionSpec:
    def d3(x):
        t = np.tanh(x)
        return (1.0 - t * t) * (6.0 * t * t - 2.0)

    return FunctionSpec(
        "tanh", Kind.S, vectorized(np.tanh),
        vectorized(lambda x: 1.0 - np.tanh(x) ** 2),
        vectorized(lambda x: -2.0 * np.tanh(x) * (1.0 - np.tanh(x) ** 2)),
        vectorized(d3),
        taylor=TaylorSignature(1.0, 1 / 3, 3), domain_radius=10.0,
    )


def _asinh_spec() -> FunctionSpec:
    return FunctionSpec(
        "asinh", Kind.S, vectorized(np.arcsinh),
        vectorized(lambda x: (1.0 + x * x) ** -0.5),
        vectorized(lambda x: -x * (1.0 + x * x) ** -1.5),
        vectorized(lambda x: (2.0 * x * x - 1.0) * (1.0 + x * x) ** -2.5),
        taylor=TaylorSignature(1.0, 1 / 6, 3), domain_radius=10.0,
    )


def _erf_spec() -> FunctionSpec:
    k = 2.0 / math.sqrt(math.pi)
    return FunctionSpec(
        "erf", Kind.S, vectorized(special.erf),
        vectorized(lambda x: k * np.exp(-x * x)),
        vectorized(lambda x: -2.0 * x * k * np.exp(-x * x)),
        vectorized(lambda x: (4.0 * x * x - 2.0) * k * np.exp(-x * x)),
        taylor=TaylorSignature(k, 1 / 3, 3), domain_radius=6.0,
    )


def _identity_spec() -> FunctionSpec:
    return FunctionSpec(
        "identity", Kind.IDENTITY, vectorized(lambda x: x.copy()),
        vectorized(np.ones_like), vectorized(np.zeros_like), vectorized(np.zeros_like),
        domain_radius=math.inf,
    )


def _cos_spec() -> FunctionSpec:
    return FunctionSpec(
        "cos", Kind.C, vectorized(np.cos), vectorized(lambda x: -np.sin(x)),
        vectorized(lambda x: -np.cos(x)), vectorized(np.sin),
        taylor=TaylorSignature(1.0, 0.5, 2), domain_radius=math.pi / 2,
    )


def _sech_spec() -> FunctionSpec:
    def sech(x):
        return 1.0 / np.cosh(x)

    return FunctionSpec(
        "sech", Kind.C, vectorized(sech),
        vectorized(lambda x: -sech(x) * np.tanh(x)),
        vectorized(lambda x: sech(x) * (1.0 - 2.0 * sech(x) ** 2)),
        vectorized(lambda x: sech(x) * np.tanh(x) * (6.0 * sech(x) ** 2 - 1.0)),
        taylor=TaylorSignature(1.0, 0.5, 2), domain_radius=20.0,
    )


def exp_power_spec(k: int) -> FunctionSpec:
    """``exp(-x**k)`` for an integer ``k >= 2``; concave up to ``((k-1)/k)**(1/k)``."""
    if int(k) != k or k < 2:
        raise ValueError("exp(-x^k) needs an integer k >= 2")
    k = int(k)

    def d2(x):
        return k * x ** (k - 2) * (k * x**k - (k - 1)) * np.exp(-(x**k))

    return FunctionSpec(
        f"exp_neg_x{k}", Kind.C, vectorized(lambda x: np.exp(-(x**k))),
        vectorized(lambda x: -k * x ** (k - 1) * np.exp(-(x**k))),
        vectorized(d2),
        taylor=TaylorSignature(1.0, 1.0, k),
        closed_form_epsilon=((k - 1) / k) ** (1.0 / k), domain_radius=5.0,
    )


def _lorentz_spec() -> FunctionSpec:
    return FunctionSpec(
        "inv_one_plus_x2", Kind.C, vectorized(lambda x: 1.0 / (1.0 + x * x)),
        vectorized(lambda x: -2.0 * x / (1.0 + x * x) ** 2),
        vectorized(lambda x: (6.0 * x * x - 2.0) / (1.0 + x * x) ** 3),
        vectorized(lambda x: 24.0 * x * (1.0 - x * x) / (1.0 + x * x) ** 4),
        taylor=TaylorSignature(1.0, 1.0, 2), domain_radius=20.0,
    )


def _one_spec() -> FunctionSpec:
    return FunctionSpec(
        "one", Kind.CONSTANT_ONE, vectorized(np.ones_like),
        vectorized(np.zeros_like), vectorized(np.zeros_like), vectorized(np.zeros_like),
        domain_radius=math.inf,
    )


def _arccot_spec() -> FunctionSpec:
    # H(0) = pi/2 but H'(0) = -1, so this fails the C conditions; kept flagged
    return FunctionSpec(
        "arccot", Kind.C, vectorized(lambda x: np.pi / 2 - np.arctan(x)),
        vectorized(lambda x: -1.0 / (1.0 + x * x)),
        vectorized(lambda x: 2.0 * x / (1.0 + x * x) ** 2),
        domain_radius=20.0, listed_only=True,
    )


_BUILDERS: dict[str, Callable[[], FunctionSpec]] = {
    "sin": _sin_spec,
    "arctan": _arctan_spec,
    "tanh": _tanh_spec,
    "asinh": _asinh_spec,
    "erf": _erf_spec,
    "identity": _identity_spec,
    "cos": _cos_spec,
    "sech": _sech_spec,
    "exp_neg_x2": lambda: exp_power_spec(2),
    "exp_neg_x3": lambda: exp_power_spec(3),
    "exp_neg_x4": lambda: exp_power_spec(4),
    "inv_one_plus_x2": _lorentz_spec,
    "one": _one_spec,
    "arccot": _arccot_spec,
}

S_FUNCTIONS = ("sin", "arctan", "tanh", "asinh", "erf")
C_FUNCTIONS = ("cos", "sech", "exp_neg_x2", "exp_neg_x3", "exp_neg_x4", "inv_one_plus_x2")

_EXP_NAME = re.compile(r"exp_neg_x(\d+)$")


@functools.lru_cache(maxsize=None)
def get(name: str) -> FunctionSpec:
    """Look up a catalog entry by name (``exp_neg_xK`` works for any ``K >= 2``)."""
    if name in _BUILDERS:
        return _BUILDERS[name]()
    match = _EXP_NAME.match(name)
    if match:
        return exp_power_spec(int(match.group(1)))
    raise KeyError(f"unknown catalog function {name!r}")


def names(include_listed_only: bool = False) -> list[str]:
    return [n for n in _BUILDERS if include_listed_only or not get(n).listed_only]


def entries(include_listed_only: bool = False) -> Iterator[FunctionSpec]:
    for n in names(include_listed_only):
        yield get(n)


# ---------------------------------------------------------------------------
# S <-> C and the closure combinators


def _require(f: FunctionSpec, kinds, what: str):
    if f.kind not in kinds:
        raise KindMismatchError(f"{what} expects {'/'.join(k.value for k in kinds)}, got {f!r}")


def _quotient_name(name: str) -> str:
    return "sinc" if name == "sin" else f"{name}(x)/x"


def to_C(h: FunctionSpec) -> FunctionSpec:
    """Return the C-function ``H(x) = h(x)/x`` with ``H(0) = h'(0)``.

    Near the origin the derivatives of ``H`` come from the integral forms
    ``H^(r)(x) = int_0^1 t^r h^(r+1)(x t) dt`` (Gauss-Legendre), which avoids
    the cancellation in ``(x^2 h'' - 2 x h' + 2 h)/x^3``.
    """
    _require(h, _S_LIKE, "to_C")
    if h.kind is Kind.IDENTITY:
        return get("one")
    if h.quotient is not None:
        return h.quotient
    h1, h2, h3 = h.d1, h.d2, h.d3

    @vectorized
    def value(x):
        # h(x)/x underflows to garbage for subnormal x; use int_0^1 h'(xt) dt there
        out = np.empty_like(x)
        tiny = np.abs(x) < _QUOTIENT_TINY
        out[~tiny] = h.eval(x[~tiny]) / x[~tiny]
        out[tiny] = h1(np.outer(x[tiny], _GL_T)) @ _GL_W
        return out

    @vectorized
    def first(x):
        out = np.empty_like(x)
        big = x >= _QUOTIENT_SWITCH
        xb = x[big]
        out[big] = (xb * h1(xb) - h.eval(xb)) / xb**2
        xs = x[~big]
        out[~big] = h2(np.outer(xs, _GL_T)) @ (_GL_W * _GL_T)
        return out

    second_small = None
    if h3 is not None:
        def second_small(xs):
            return h3(np.outer(xs, _GL_T)) @ (_GL_W * _GL_T**2)
    else:
        fallback = _numeric_derivative(value, 2)

        def second_small(xs):
            return fallback(xs)

    @vectorized
    def second(x):
        out = np.empty_like(x)
        big = x >= _QUOTIENT_SWITCH
        xb = x[big]
        out[big] = (xb**2 * h2(xb) - 2.0 * xb * h1(xb) + 2.0 * h.eval(xb)) / xb**3
        out[~big] = second_small(x[~big])
        return out

    taylor = None
    if h.taylor is not None:
        taylor = TaylorSignature(h.taylor.alpha, h.taylor.lam, h.taylor.k - 1)
    return FunctionSpec(
        _quotient_name(h.name), Kind.C, value, first, second,
        taylor=taylor, closed_form_epsilon=h.closed_form_epsilon,
        domain_radius=h.domain_radius,
    )


def _probe(f: FunctionSpec) -> float:
    return min(0.1, f.domain_radius)


def _admit(f: FunctionSpec, expected: FunctionClass) -> FunctionSpec:
    report = classify(f, probe_radius=_probe(f))
    if report.verdict is not expected:
        failures = report.s_failures if expected is FunctionClass.S else report.c_failures
        raise ClosureViolationError(
            f"{f.name} classifies as {report.verdict.value}, expected {expected.value}: "
            + "; ".join(failures)
        )
    return f


def _matching_lam(sig: TaylorSignature, k: int) -> float:
    return sig.lam if sig.k == k else 0.0


def combine_add(f: FunctionSpec, g: FunctionSpec) -> FunctionSpec:
    """Pointwise sum of two C-functions."""
    _require(f, _C_LIKE, "combine_add")
    _require(g, _C_LIKE, "combine_add")
    taylor = None
    if f.taylor and g.taylor:
        k = min(f.taylor.k, g.taylor.k)
        alpha = f.taylor.alpha + g.taylor.alpha
        lam = (f.taylor.alpha * _matching_lam(f.taylor, k)
               + g.taylor.alpha * _matching_lam(g.taylor, k)) / alpha
        taylor = TaylorSignature(alpha, lam, k)
    d3 = None
    if f.d3 and g.d3:
        d3 = vectorized(lambda x: f.d3(x) + g.d3(x))
    spec = FunctionSpec(
        f"add({f.name},{g.name})", Kind.C,
        vectorized(lambda x: f.eval(x) + g.eval(x)),
        vectorized(lambda x: f.d1(x) + g.d1(x)),
        vectorized(lambda x: f.d2(x) + g.d2(x)),
        d3, taylor=taylor, domain_radius=min(f.domain_radius, g.domain_radius),
    )
    return _admit(spec, FunctionClass.C)


def _product(f: FunctionSpec, g: FunctionSpec, name: str, kind: Kind, taylor, quotient=None):
    d3 = None
    if f.d3 and g.d3:
        d3 = vectorized(lambda x: f.d3(x) * g.eval(x) + 3.0 * f.d2(x) * g.d1(x)
                        + 3.0 * f.d1(x) * g.d2(x) + f.eval(x) * g.d3(x))
    return FunctionSpec(
        name, kind,
        vectorized(lambda x: f.eval(x) * g.eval(x)),
        vectorized(lambda x: f.d1(x) * g.eval(x) + f.eval(x) * g.d1(x)),
        vectorized(lambda x: f.d2(x) * g.eval(x) + 2.0 * f.d1(x) * g.d1(x) + f.eval(x) * g.d2(x)),
        d3, taylor=taylor, domain_radius=min(f.domain_radius, g.domain_radius),
        quotient=quotient,
    )


def combine_mul(f: FunctionSpec, g: FunctionSpec) -> FunctionSpec:
    """Pointwise product of two C-functions."""
    _require(f, _C_LIKE, "combine_mul")
    _require(g, _C_LIKE, "combine_mul")
    taylor = None
    if f.taylor and g.taylor:
        k = min(f.taylor.k, g.taylor.k)
        taylor = TaylorSignature(
            f.taylor.alpha * g.taylor.alpha,
            _matching_lam(f.taylor, k) + _matching_lam(g.taylor, k), k,
        )
    spec = _product(f, g, f"mul({f.name},{g.name})", Kind.C, taylor)
    return _admit(spec, FunctionClass.C)


def scale_module(f: FunctionSpec, s: FunctionSpec) -> FunctionSpec:
    """The S-function ``f*s`` for a C-function ``f`` and an S-function ``s``."""
    _require(f, _C_LIKE, "scale_module")
    _require(s, _S_LIKE, "scale_module")
    taylor = None
    if f.taylor and s.taylor:
        # f*s = af*as*(x - ls x^ks - lf x^(kf+1) + ...)
        k = min(s.taylor.k, f.taylor.k + 1)
        lam = (s.taylor.lam if s.taylor.k == k else 0.0) + (
            f.taylor.lam if f.taylor.k + 1 == k else 0.0)
        taylor = TaylorSignature(f.taylor.alpha * s.taylor.alpha, lam, k)
    quotient = combine_mul(f, to_C(s))
    spec = _product(f, s, f"scale({f.name},{s.name})", Kind.S, taylor, quotient)
    return _admit(spec, FunctionClass.S)


def derivative_of_S(s: FunctionSpec) -> FunctionSpec:
    """The derivative of an S-function, which is a C-function."""
    _require(s, _S_LIKE, "derivative_of_S")
    if s.numeric_derivatives:
        raise PreconditionError(f"{s.name} has no closed-form first derivative")
    if s.kind is Kind.IDENTITY:
        return get("one")
    taylor = None
    if s.taylor is not None:
        taylor = TaylorSignature(s.taylor.alpha, s.taylor.k * s.taylor.lam, s.taylor.k - 1)
    spec = FunctionSpec(
        f"deriv({s.name})", Kind.C, s.d1, s.d2, s.d3,
        taylor=taylor, domain_radius=s.domain_radius,
    )
    return _admit(spec, FunctionClass.C)


def rescale(f: FunctionSpec, d: float) -> FunctionSpec:
    """Return ``x -> f(d*x)``, folding the argument scale ``d`` into the function.

    Products with argument scale ``d`` and bound ``eps`` equal products of
    the rescaled function with scale 1 and bound ``eps/d``.
    """
    if d == 1:
        return f
    if not d > 0:
        raise ValueError("scale must be positive")
    taylor = None
    if f.taylor is not None:
        t = f.taylor
        if f.kind in _S_LIKE:
            taylor = TaylorSignature(t.alpha * d, t.lam * d ** (t.k - 1), t.k)
        else:
            taylor = TaylorSignature(t.alpha, t.lam * d**t.k, t.k)
    d3 = None
    if f.d3 is not None:
        d3 = vectorized(lambda x: d**3 * f.d3(d * x))
    eps = None if f.closed_form_epsilon is None else f.closed_form_epsilon / d
    kind = Kind.S if f.kind is Kind.IDENTITY else f.kind
    return FunctionSpec(
        f"{f.name}({d:.17g}x)", kind,
        vectorized(lambda x: f.eval(d * x)),
        None if f.numeric_derivatives else vectorized(lambda x: d * f.d1(d * x)),
        None if f.numeric_derivatives else vectorized(lambda x: d * d * f.d2(d * x)),
        d3, taylor=taylor, closed_form_epsilon=eps, domain_radius=f.domain_radius / d,
        listed_only=f.listed_only,
    )


# ---------------------------------------------------------------------------
# choosing epsilon


def compatibility_cap(cd: float) -> float:
    """Largest admissible epsilon: ``cd`` itself when ``cd > 1``, otherwise just below it."""
    if not cd > 0:
        raise ValueError("c*d must be positive")
    return cd if cd > 1 else cd * (1.0 - 1e-9)


def satisfies_concavity(H: FunctionSpec, eps: float, points: int = 1000,
                        h2_tol: float = _VERIFY_H2) -> bool:
    x = np.linspace(0.0, eps, points)
    return bool(np.all(H.eval(x) > 0) and np.all(H.d2(x) <= h2_tol))


def find_epsilon(H: FunctionSpec, cd: float, scan: int = 4096) -> float:
    """Largest epsilon with ``H > 0`` and ``H'' <= 0`` on ``[0, eps]``.

    The search is capped by the domain radius and by the compatibility cap
    for ``cd``.  A closed-form epsilon carried by ``H`` wins whenever it fits
    under the cap and passes verification.
    """
    _require(H, _C_LIKE, "find_epsilon")
    upper = min(H.domain_radius, compatibility_cap(cd))
    cf = H.closed_form_epsilon
    if cf is not None and cf <= upper and satisfies_concavity(H, cf):
        return float(cf)

    def good(x):
        x = np.asarray(x, dtype=float)
        return (H.eval(x) > 0) & (H.d2(x) <= _H2_SLACK)

    grid = np.linspace(0.0, upper, scan + 1)
    ok = good(grid)
    if ok.all():
        return float(upper)
    first_bad = int(np.argmin(ok))
    if first_bad == 0:
        raise NoValidEpsilonError(f"{H.name}: hypotheses fail already at x=0")
    lo, hi = float(grid[first_bad - 1]), float(grid[first_bad])
    while hi - lo > 4 * _U * hi:
        mid = 0.5 * (lo + hi)
        if good(mid):
            lo = mid
        else:
            hi = mid
    return lo
