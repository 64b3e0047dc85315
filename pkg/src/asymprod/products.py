"""Finite products D_n, K_n and E_n, held in the log domain.

With term bound ``m`` (the largest index keeping both ``(cm+a)d/n`` and
``(cm+b)d/n`` at or below ``eps``)::

    D_n = prod_{j=0}^m h((cj+a)d/n) / h((cj+b)d/n)
    K_n = prod_{j=0}^m (cj+a) / (cj+b)
    E_n = D_n / K_n = prod_{j=0}^m H((cj+a)/n) / H((cj+b)/n),   H(x) = h(x)/x, d = 1
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .catalog import FunctionSpec, Kind
from .errors import (
    HypothesisViolationError,
    InvalidParamsError,
    KindMismatchError,
    PreconditionError,
    ResourceLimitError,
    UnsupportedInputError,
)

FLOOR_GUARD = 1e-12
EXACT_TERM_CAP = 10**5


@dataclass(frozen=True)
class ProductParams:
    """Parameters ``(a, b, c, d, eps, n)`` of the products.

    ``a``, ``b``, ``c`` may be ints or Fractions so the exact K_n path can use
    them.  ``compat_override`` skips the compatibility condition
    (``eps <= c*d``, strict unless ``c*d > 1``) for cases known not to need it.
    """

    a: numbers.Real
    b: numbers.Real
    c: numbers.Real
    d: numbers.Real
    eps: numbers.Real
    n: int
    compat_override: bool = False

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "eps"):
            value = getattr(self, name)
            if not isinstance(value, numbers.Real) or not math.isfinite(value) or not value > 0:
                raise InvalidParamsError(f"{name} must be a finite positive real, got {value!r}")
        if isinstance(self.n, bool) or not isinstance(self.n, numbers.Integral) or self.n < 1:
            raise InvalidParamsError(f"n must be a positive integer, got {self.n!r}")
        if not self.compat_override:
            cd = self.c * self.d
            if self.eps > cd:
                raise InvalidParamsError(f"eps={self.eps!r} exceeds c*d={cd!r}")
            if self.eps == cd and not cd > 1:
                raise InvalidParamsError("eps = c*d is only allowed when c*d > 1")

    def with_n(self, n: int) -> "ProductParams":
        return replace(self, n=n)

    @property
    def m(self) -> int:
        return term_count(self)

    @property
    def reduced_eps(self) -> float:
        """``eps/d``: the bound in units where the argument scale is 1."""
        return float(self.eps) / float(self.d)


@dataclass(frozen=True)
class ProductValue:
    """A positive product stored as its natural log.

    ``comp_error_bound`` is the amount by which compensated summation moved
    the total away from the plain floating-point sum.
    """

    log_value: float
    m: int
    terms: int
    comp_error_bound: float = 0.0

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


EMPTY_M = -1


def term_count(p: ProductParams) -> int:
    """``floor(n*eps/(c*d) - max(a,b)/c)``, possibly -1 for an empty product."""
    v = p.n * float(p.eps) / (float(p.c) * float(p.d)) - float(max(p.a, p.b)) / float(p.c)
    return max(math.floor(v + FLOOR_GUARD * max(1.0, abs(v))), EMPTY_M)


def _sum_logs(terms: np.ndarray, m: int) -> ProductValue:
    total = math.fsum(terms)
    plain = float(np.sum(terms))
    return ProductValue(total, m, m + 1, abs(total - plain))


def _empty() -> ProductValue:
    return ProductValue(0.0, EMPTY_M, 0, 0.0)


def eval_K(p: ProductParams) -> ProductValue:
    m = term_count(p)
    if m < 0:
        return _empty()
    j = np.arange(m + 1, dtype=float)
    c = float(p.c)
    terms = np.log(c * j + float(p.a)) - np.log(c * j + float(p.b))
    return _sum_logs(terms, m)


def exact_k_product(a, b, c, m: int, cap: int = EXACT_TERM_CAP) -> Fraction:
    """``prod_{j=0}^m (cj+a)/(cj+b)`` as a reduced Fraction, for rational a, b, c."""
    for name, value in (("a", a), ("b", b), ("c", c)):
        if isinstance(value, bool) or not isinstance(value, numbers.Rational):
            raise UnsupportedInputError(f"{name} must be an int or Fraction, got {type(value).__name__}")
    if m > cap:
        raise ResourceLimitError(f"m={m} exceeds the exact-product cap {cap}")
    if m < 0:
        return Fraction(1)
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    # clear denominators: (cj+a)/(cj+b) = (C j + A)/(C j + B)
    lcm = math.lcm(a.denominator, b.denominator, c.denominator)
    A, B, C = int(a * lcm), int(b * lcm), int(c * lcm)
    num = _tree_product([C * j + A for j in range(m + 1)])
    den = _tree_product([C * j + B for j in range(m + 1)])
    return Fraction(num, den)


def _tree_product(values: list[int]) -> int:
    while len(values) > 1:
        paired = [values[i] * values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            paired.append(values[-1])
        values = paired
    return values[0]


def eval_K_exact(p: ProductParams, cap: int = EXACT_TERM_CAP) -> Fraction:
    return exact_k_product(p.a, p.b, p.c, term_count(p), cap)


def _log_quotients(f: FunctionSpec, xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    fa = np.asarray(f.eval(xa), dtype=float)
    fb = np.asarray(f.eval(xb), dtype=float)
    for x, v in ((xa, fa), (xb, fb)):
        bad = ~(np.isfinite(v) & (v > 0))
        if bad.any():
            i = int(np.argmax(bad))
            raise HypothesisViolationError(
                f"{f.name} is not positive and finite at x={x[i]!r} (value {v[i]!r})"
            )
    return np.log(fa) - np.log(fb)


def eval_D(p: ProductParams, h: FunctionSpec) -> ProductValue:
    """D_n for any positive function; the identity reuses the K_n summands."""
    if h.kind is Kind.IDENTITY:
        return eval_K(p)
    m = term_count(p)
    if m < 0:
        return _empty()
    j = np.arange(m + 1, dtype=float)
    c = float(p.c)
    scale = float(p.d) / p.n
    xa = (c * j + float(p.a)) * scale
    xb = (c * j + float(p.b)) * scale
    return _sum_logs(_log_quotients(h, xa, xb), m)


def eval_E(p: ProductParams, H: FunctionSpec) -> ProductValue:
    """E_n as the product of H-quotients (not as D_n/K_n); requires ``d == 1``."""
    if p.d != 1:
        raise PreconditionError("eval_E works with d = 1; fold the scale into H first")
    if H.kind not in (Kind.C, Kind.CONSTANT_ONE):
        raise KindMismatchError(f"eval_E expects a C-function, got {H!r}")
    m = term_count(p)
    if m < 0:
        return _empty()
    if H.kind is Kind.CONSTANT_ONE:
        return ProductValue(0.0, m, m + 1, 0.0)
    j = np.arange(m + 1, dtype=float)
    c = float(p.c)
    xa = (c * j + float(p.a)) / p.n
    xb = (c * j + float(p.b)) / p.n
    return _sum_logs(_log_quotients(H, xa, xb), m)
