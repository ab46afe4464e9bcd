"""Numerical special functions for the Beta/Dirichlet machinery.

Log-gamma, digamma, the regularized incomplete beta function (Beta CDF) and
its inverse. The incomplete beta follows the classic continued-fraction
scheme with modified Lentz evaluation, switching tails at
x > (a + 1) / (a + b + 2); the quantile is a Newton iteration safeguarded by
bisection. Everything is scalar, pure and reentrant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["BetaShape", "log_gamma", "digamma", "beta_cdf", "beta_pdf", "beta_quantile"]

# Accuracy envelope: concentrations beyond this are degenerate for our use.
MAX_SHAPE = 1e6

_CF_EPS = 1e-15
_CF_FPMIN = 1e-300
_CF_MAXIT = 3000

_QUANTILE_TOL = 5e-13
_QUANTILE_MAXIT = 200

# Asymptotic series for digamma: psi(x) ~ ln x - 1/(2x) - sum c_n / x^(2n),
# coefficients B_2n / (2n) for n = 1..7.
_PSI_COEFFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


@dataclass(frozen=True)
class BetaShape:
    """Shape parameters of a Beta distribution, both strictly positive."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError(f"beta shapes must be positive, got ({self.alpha}, {self.beta})")
        if self.alpha > MAX_SHAPE or self.beta > MAX_SHAPE:
            raise ValueError(f"beta shapes above {MAX_SHAPE:g} are outside the accuracy envelope")


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def digamma(x: float) -> float:
    """psi(x) = d/dx ln Gamma(x) for x > 0.

    Uses the recurrence psi(x) = psi(x + 1) - 1/x to shift the argument
    above 10, then the Bernoulli asymptotic series.
    """
    if not x > 0.0:
        raise ValueError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    term = inv2
    for c in _PSI_COEFFS:
        series += c * term
        term *= inv2
    return acc + math.log(x) - 0.5 / x - series


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta, modified Lentz method."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_FPMIN:
        d = _CF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_FPMIN:
            d = _CF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _CF_FPMIN:
            c = _CF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction failed for a={a}, b={b}, x={x}")


def beta_cdf(shape: BetaShape, x: float) -> float:
    """Regularized incomplete beta function I_x(alpha, beta)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"beta_cdf requires x in [0, 1], got {x}")
    a, b = shape.alpha, shape.beta
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b))
    if x < (a + 1.0) / (a + b + 2.0):
        return min(1.0, front * _betacf(a, b, x) / a)
    return max(0.0, 1.0 - front * _betacf(b, a, 1.0 - x) / b)


def beta_pdf(shape: BetaShape, x: float) -> float:
    """Beta density x^(a-1) (1-x)^(b-1) / B(a, b); +inf at divergent endpoints."""
    a, b = shape.alpha, shape.beta
    if not 0.0 <= x <= 1.0:
        return 0.0
    if x == 0.0:
        return math.inf if a < 1.0 else (b if a == 1.0 else 0.0)
    if x == 1.0:
        return math.inf if b < 1.0 else (a if b == 1.0 else 0.0)
    return math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - _log_beta(a, b))


def beta_quantile(shape: BetaShape, u: float, x0: float | None = None) -> float:
    """Inverse of ``beta_cdf``: the x in (0, 1) with I_x(alpha, beta) = u.

    Newton iteration from a moment-matched initial guess (or the caller's
    warm start ``x0``), falling back to bisection whenever a step leaves the
    current bracket or fails to shrink the residual. Monotonicity of the CDF
    guarantees convergence; a hard cap raises if it is ever exceeded.
    """
    if not 0.0 < u < 1.0:
        raise ValueError(f"beta_quantile requires u in (0, 1), got {u}")
    a, b = shape.alpha, shape.beta
    lo, hi = 0.0, 1.0
    if x0 is not None and 0.0 < x0 < 1.0:
        x = x0
    else:
        x = _quantile_start(a, b, u)
    err = beta_cdf(shape, x) - u
    for _ in range(_QUANTILE_MAXIT):
        if abs(err) <= _QUANTILE_TOL:
            return x
        if err > 0.0:
            hi = x
        else:
            lo = x
        f = beta_pdf(shape, x)
        step_ok = False
        if math.isfinite(f) and f > 0.0:
            xn = x - err / f
            if lo < xn < hi:
                en = beta_cdf(shape, xn) - u
                if abs(en) < abs(err):
                    x, err = xn, en
                    step_ok = True
        if not step_ok:
            x = 0.5 * (lo + hi)
            err = beta_cdf(shape, x) - u
        if hi - lo < 1e-16 * max(hi, 1e-300):
            break
    if abs(err) <= 1e-10:
        return x
    raise ArithmeticError(
        f"beta_quantile failed to converge for shape=({a}, {b}), u={u}: residual {err:.3e}"
    )


def _quantile_start(a: float, b: float, u: float) -> float:
    """Initial guess: moment matched in the body, power-law in the tails.

    Near the endpoints the CDF behaves as x^a / (a B(a, b)) on the left and
    (1 - x)^b / (b B(a, b)) on the right; inverting those puts the starting
    point at the right order of magnitude, which plain bisection cannot
    reach for extreme quantiles.
    """
    log_b = _log_beta(a, b)
    if u < 0.05:
        xt = math.exp((math.log(u * a) + log_b) / a)
        if xt < 0.25:
            return max(xt, 1e-300)
    if u > 0.95:
        yt = math.exp((math.log((1.0 - u) * b) + log_b) / b)
        if yt < 0.25:
            return min(1.0 - yt, 1.0 - 1e-16)
    mean = a / (a + b)
    return min(1.0 - 1e-12, max(1e-12, 0.5 * (mean + u)))
