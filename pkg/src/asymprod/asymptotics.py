"""Closed-form side: log-Gamma, the Gamma-ratio form of K_n, and limiting constants."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EvaluationDomainError, PreconditionError

# Lanczos approximation with g = 607/128 and 15 terms (Godfrey's coefficients)
_LANCZOS_SHIFT = 5.24218750000000000  # g + 1/2
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COEFFS = (
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, 0.339946499848118887e-4, 0.465236289270485756e-4,
    -0.983744753048795646e-4, 0.158088703224912494e-3, -0.210264441724104883e-3,
    0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5,
)
_SQRT_2PI = 2.5066282746310005

_EULER_GAMMA = 0.5772156649015329
# zeta(k) - 1 for k = 2..27, for the series of lgamma(1+z) and lgamma(2+z)
_ZETA_MINUS_ONE = (
    0.6449340668482264, 0.2020569031595943, 0.08232323371113819, 0.03692775514336993,
    0.01734306198444914, 0.008349277381922827, 0.00407735619794434, 0.0020083928260822143,
    0.0009945751278180853, 0.0004941886041194645, 0.0002460865533080483,
    0.00012271334757848915, 6.124813505870483e-05, 3.058823630702049e-05,
    1.528225940865187e-05, 7.637197637899763e-06, 3.81729326499984e-06,
    1.908212716553939e-06, 9.539620338727962e-07, 4.769329867878064e-07,
    2.38450502727733e-07, 1.1921992596531106e-07, 5.960818905125948e-08,
    2.980350351465228e-08, 1.4901554828365043e-08, 7.45071178983543e-09,
)
_SERIES_RADIUS = 0.35

# Stirling correction terms B_2k / (2k (2k-1))
_STIRLING = (
    1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360, 1 / 156, -3617 / 122400,
)
_STIRLING_MIN = 10.0


def _zeta_tail(z: float) -> float:
    """sum_{k>=2} (-1)^k (zeta(k) - 1) z^k / k."""
    total = 0.0
    power = z * z
    for k, coeff in enumerate(_ZETA_MINUS_ONE, start=2):
        term = coeff * power / k
        total += term if k % 2 == 0 else -term
        power *= z
    return total


def _lanczos(x: float) -> float:
    tmp = x + _LANCZOS_SHIFT
    tmp = (x + 0.5) * math.log(tmp) - tmp
    ser = _LANCZOS_C0
    y = x
    for c in _LANCZOS_COEFFS:
        y += 1.0
        ser += c / y
    return tmp + math.log(_SQRT_2PI * ser / x)


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0.

    Uses the Lanczos sum away from the zeros at 1 and 2, and the zeta series
    of ``lgamma(1+z)`` close to them so the result keeps full relative accuracy
    there.  Small arguments go through ``lgamma(x) = lgamma(1+x) - log(x)``.
    """
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise EvaluationDomainError(f"log_gamma needs a finite positive argument, got {x!r}")
    if x < _SERIES_RADIUS:
        return -_EULER_GAMMA * x + x - math.log1p(x) + _zeta_tail(x) - math.log(x)
    z = x - 1.0
    if abs(z) < _SERIES_RADIUS:
        return -_EULER_GAMMA * z + z - math.log1p(z) + _zeta_tail(z)
    z = x - 2.0
    if abs(z) < _SERIES_RADIUS:
        return (1.0 - _EULER_GAMMA) * z + _zeta_tail(z)
    return _lanczos(x)


def _stirling_correction(x: float) -> float:
    inv = 1.0 / x
    inv2 = inv * inv
    total = 0.0
    power = inv
    for c in _STIRLING:
        total += c * power
        power *= inv2
    return total


def log_gamma_shift(y: float, delta: float) -> float:
    """``log_gamma(y + delta) - log_gamma(y)`` without cancelling two large logs."""
    x = y + delta
    if min(x, y) < _STIRLING_MIN:
        return log_gamma(x) - log_gamma(y)
    return (
        delta * math.log(x)
        + (y - 0.5) * math.log1p(delta / y)
        - delta
        + _stirling_correction(x)
        - _stirling_correction(y)
    )


def k_gamma_identity(a: float, b: float, c: float, m: int) -> float:
    """``prod_{j=0}^m (cj+a)/(cj+b)`` written as a ratio of Gamma functions."""
    if m < 0 or int(m) != m:
        raise PreconditionError("m must be a nonnegative integer")
    a, b, c = float(a), float(b), float(c)
    head = log_gamma(b / c) - log_gamma(a / c)
    return math.exp(head + log_gamma_shift(m + 1 + b / c, (a - b) / c))


@dataclass(frozen=True)
class Asymptote:
    """``constant * n**exponent``; ``log_constant`` is kept to avoid overflow."""

    constant: float
    exponent: float
    log_constant: float


def growth_exponent(a: float, b: float, c: float) -> float:
    if not c > 0:
        raise PreconditionError("c must be positive")
    return (float(a) - float(b)) / float(c)


def k_asymptote(a: float, b: float, c: float, eps: float) -> Asymptote:
    """Leading behaviour of K_n in n.

    ``eps`` is measured in units of the argument scale, so pass ``eps/d``
    when the product uses a scale ``d != 1``.
    """
    a, b, c, eps = float(a), float(b), float(c), float(eps)
    if min(a, b, c, eps) <= 0:
        raise PreconditionError("a, b, c, eps must all be positive")
    exponent = growth_exponent(a, b, c)
    log_constant = log_gamma(b / c) - log_gamma(a / c) + exponent * math.log(eps / c)
    return Asymptote(math.exp(log_constant), exponent, log_constant)


def c_upper_bound(a: float, b: float, c: float, eps: float) -> float:
    """Upper bound for the constant C in ``D_n ~ C n^((a-b)/c)`` when ``a > b``.

    Equal to the K_n asymptote constant, since every factor of E_n is below 1.
    """
    if not a > b:
        raise PreconditionError("the upper bound on C needs a > b")
    return k_asymptote(a, b, c, eps).constant


def exercise_limit(a: float, b: float, c: float, k: int) -> float:
    """Limit of D_n for ``h = exp(-x**k)`` with ``eps = ((k-1)/k)**(1/k)``."""
    if int(k) != k or k < 2:
        raise PreconditionError("k must be an integer >= 2")
    return math.exp(-((k - 1) / k) * (float(a) - float(b)) / float(c))
