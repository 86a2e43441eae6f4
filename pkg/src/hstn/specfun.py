"""Special functions and adaptive quadrature used by the outage formulas.

Thin, validated wrappers over ``scipy.special`` and QUADPACK (``scipy.integrate.quad``).
The wrappers pin the domain checks and the error contract; the test-suite checks
every function against an independent route (series, integral representation,
factorial arithmetic).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special


class SpecfunDomainError(ValueError):
    """Argument outside the supported domain of a special function."""


class AccuracyError(RuntimeError):
    """Quadrature did not meet its tolerance; ``estimate`` holds the best value."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureSpec()


def ln_gamma(x: float) -> float:
    if not x > 0:
        raise SpecfunDomainError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def reg_lower_incomplete_gamma(a, x):
    """Regularized lower incomplete gamma P(a, x) = Upsilon(a, x) / Gamma(a).

    Accepts scalars or arrays for ``x``; ``x = inf`` gives 1.
    """
    if not a > 0:
        raise SpecfunDomainError(f"P(a, x) requires a > 0, got a={a}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(np.isnan(xa)):
        raise SpecfunDomainError("P(a, x) requires x >= 0")
    out = special.gammainc(a, xa)
    return float(out) if out.ndim == 0 else out


def bessel_j(order: int, x):
    if order not in (1, 3):
        raise SpecfunDomainError(f"bessel_j supports orders 1 and 3, got {order}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise SpecfunDomainError("bessel_j requires x >= 0")
    out = special.jv(order, xa)
    return float(out) if out.ndim == 0 else out


def bessel_k(order: int, x):
    """Modified Bessel function of the second kind, integer order.

    Negative orders are folded with K_{-v} = K_v.
    """
    if int(order) != order:
        raise SpecfunDomainError(f"bessel_k supports integer orders only, got {order}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise SpecfunDomainError("bessel_k requires x > 0")
    out = special.kv(abs(int(order)), xa)
    return float(out) if out.ndim == 0 else out


def log_bessel_k(order: int, x):
    """log K_v(x), finite where K_v itself under/overflows."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise SpecfunDomainError("bessel_k requires x > 0")
    v = abs(int(order))
    with np.errstate(divide="ignore"):
        out = np.log(special.kve(v, xa)) - xa
    # kve overflows for tiny x at high order; fall back to the leading term
    # K_v(x) ~ Gamma(v)/2 (2/x)^v
    bad = ~np.isfinite(out)
    if np.any(bad) and v > 0:
        out = np.where(bad, math.lgamma(v) - math.log(2.0) + v * np.log(2.0 / xa), out)
    return float(out) if out.ndim == 0 else out


def beta(a: float, b: float) -> float:
    if not (a > 0 and b > 0):
        raise SpecfunDomainError(f"beta requires a, b > 0, got ({a}, {b})")
    return math.exp(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k; exactly 0 once a non-positive integer factor appears."""
    if k < 0:
        raise SpecfunDomainError("pochhammer requires k >= 0")
    out = 1.0
    for j in range(k):
        out *= a + j
        if out == 0.0:
            return 0.0
    return out


def integrate_finite(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_QUAD,
    points=None,
) -> float:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    ``points`` are interior breakpoints (pdf joints, kinks). Raises
    :class:`AccuracyError` when the error estimate exceeds
    ``max(abs_tol, rel_tol*|result|)`` after ``max_subdivisions`` bisections.
    """
    if not a <= b:
        raise ValueError(f"integrate_finite requires a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    if points is not None:
        points = [p for p in points if a < p < b]
        if not points:
            points = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(
            f,
            a,
            b,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=spec.max_subdivisions,
            points=points,
            full_output=1,
        )[:2]
    if not np.isfinite(value) or err > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise AccuracyError(
            f"quadrature on [{a}, {b}] reached error {err:.3g} (value {value:.6g})",
            value,
            err,
        )
    return float(value)


def integrate_semi_infinite(
    f: Callable[[float], float],
    a: float,
    spec: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Integrate ``f`` over ``[a, inf)`` via x = a + t/(1 - t) on t in [0, 1)."""

    def g(t):
        if t >= 1.0:
            return 0.0
        s = 1.0 - t
        return f(a + t / s) / (s * s)

    return integrate_finite(g, 0.0, 1.0, spec)
