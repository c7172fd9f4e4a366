"""Distribution functions and critical constants shared by both pipelines.

Pure-stdlib implementations; scipy is only used by the test-suite as an
independent reference.
"""

from __future__ import annotations

import math

from .errors import DomainError, UnsupportedAlpha, UnsupportedK

__all__ = [
    "SUPPORTED_ALPHAS",
    "check_alpha",
    "chi2_sf",
    "normal_sf",
    "normal_cdf",
    "inverse_normal_cdf",
    "nemenyi_q",
]

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000

# Two-tailed Nemenyi constants q_{alpha,k,inf} / sqrt(2), indexed by k = 2..20.
# k <= 10: the classical published table.  k = 11..20: studentized-range
# quantiles with infinite degrees of freedom, rounded to 3 decimals.
_NEMENYI_Q = {
    0.05: (
        1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164,
        3.219, 3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517, 3.544,
    ),
    0.10: (
        1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920,
        2.978, 3.030, 3.077, 3.120, 3.159, 3.196, 3.230, 3.261, 3.291, 3.319,
    ),
}
SUPPORTED_ALPHAS = tuple(sorted(_NEMENYI_Q))
MAX_K = 2 + len(_NEMENYI_Q[0.05]) - 1


def check_alpha(alpha: float) -> float:
    """Validate a significance level in (0, 1) and return it as float."""
    try:
        value = float(alpha)
    except (TypeError, ValueError):
        raise DomainError(f"alpha must be a number, got {alpha!r}") from None
    if not (0.0 < value < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return value


def table_alpha(alpha: float) -> float:
    """Map ``alpha`` to its key in the Nemenyi table or raise UnsupportedAlpha."""
    value = check_alpha(alpha)
    for key in SUPPORTED_ALPHAS:
        if math.isclose(value, key, rel_tol=0.0, abs_tol=1e-12):
            return key
    raise UnsupportedAlpha(
        f"alpha={alpha} is not tabulated; supported levels are "
        + ", ".join(f"{a:g}" for a in SUPPORTED_ALPHAS)
    )


def nemenyi_q(k: int, alpha: float = 0.05) -> float:
    """Critical constant of the Nemenyi test for ``k`` methods."""
    key = table_alpha(alpha)
    if isinstance(k, bool) or int(k) != k or not 2 <= k <= MAX_K:
        raise UnsupportedK(f"k={k} is outside the tabulated range 2..{MAX_K}")
    return _NEMENYI_Q[key][int(k) - 2]


def _log_gamma_prefactor(a: float, x: float) -> float:
    """x**a * exp(-x) / Gamma(a), avoiding the cancellation of the log form."""
    if a < 170.0 and x < 700.0 and a * math.log(x) < 700.0:
        return math.exp(-x) * x**a / math.gamma(a)
    return math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_p_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * _log_gamma_prefactor(a, x)


def _gamma_q_continued_fraction(a: float, x: float) -> float:
    # modified Lentz evaluation of the Legendre continued fraction
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return _log_gamma_prefactor(a, x) * h


def chi2_sf(x: float, df: int) -> float:
    """Upper tail P(X >= x) of a chi-squared variable with ``df`` degrees of freedom.

    Uses the regularized upper incomplete gamma function Q(df/2, x/2):
    power series below ``a + 1``, continued fraction above.
    """
    if isinstance(df, bool) or int(df) != df or df < 1:
        raise DomainError(f"df must be a positive integer, got {df!r}")
    if math.isnan(x) or x < 0:
        raise DomainError(f"chi-squared statistic must be non-negative, got {x!r}")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    a = 0.5 * df
    h = 0.5 * x
    if h < a + 1.0:
        q = 1.0 - _gamma_p_series(a, h)
    else:
        q = _gamma_q_continued_fraction(a, h)
    return min(1.0, max(0.0, q))


def normal_sf(z: float) -> float:
    """Upper-tail probability of the standard normal distribution."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


# Acklam's rational approximation (relative error < 1.15e-9) followed by a
# single Halley step against erfc, which brings it to full double precision.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _lower_half_quantile(p: float) -> float:
    """Quantile for 0 < p <= 0.5."""
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    else:
        q = p - 0.5
        r = q * q
        x = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
            ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        )
    if 0.5 * x * x < 700.0:
        e = normal_cdf(x) - p
        u = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


def inverse_normal_cdf(u: float) -> float:
    """Standard normal quantile: the z with Phi(z) = u."""
    if not (0.0 < u < 1.0):
        raise DomainError(f"probability must lie strictly inside (0, 1), got {u!r}")
    if u == 0.5:
        return 0.0
    if u > 0.5:
        # 1 - u is exact here (Sterbenz), keeping the upper tail accurate
        return -_lower_half_quantile(1.0 - u)
    return _lower_half_quantile(u)
