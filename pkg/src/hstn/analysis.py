"""Exact and high-SNR outage probability for no caching, MPC and UC.

The first hop (satellite to relay) is shadowed-Rician over N antennas with
maximum-ratio beamforming, the second hop (relay to user) Nakagami-m with
random UAV-user distance W.  For one relay

    Psi(g) = Pr[ S*U/(S+U+1) < g ],   S = eta_s ||g_su||^2,  U = eta_u W^-a |g_ud|^2,

and the scheme-level outage combines ``Psi(gamma_th1)`` (two-hop delivery,
pre-log 1/2) with ``F_U(gamma_th2)`` (single-hop delivery of cached files)
through the cache hit/miss masses.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import special

from . import specfun
from .caching import CacheLayout, hit_mass
from .channel import sr_sum_cdf_scaled, sr_sum_cdf_small
from .mobility import DistanceDistribution, Mode, distance_pdf, scalar_pdf
from .scenario import OutageQuery, ScenarioConfig
from .specfun import AccuracyError, QuadratureSpec

# Psi is formed as 1 - (sum of positive terms); the terms need far tighter
# relative accuracy than the default so that Psi ~ 1e-6 keeps its digits.
SERIES_QUAD = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-12, max_subdivisions=2000)
CDF_QUAD = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-11, max_subdivisions=2000)
ORACLE_INNER = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-10, max_subdivisions=500)
ORACLE_OUTER = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-6, max_subdivisions=2000)


def _dist(scenario: ScenarioConfig, mode: Mode) -> DistanceDistribution:
    return DistanceDistribution(mode, scenario.mobility)


def _integrate_over_support(f, dist: DistanceDistribution, spec: QuadratureSpec) -> float:
    lo, hi = dist.support
    return specfun.integrate_finite(f, lo, hi, spec, points=dist.breakpoints)


# ---------------------------------------------------------------------------
# second hop
# ---------------------------------------------------------------------------


def cdf_lambda_ud(x: float, mode: Mode, scenario: ScenarioConfig, eta_u: float, spec: QuadratureSpec = CDF_QUAD) -> float:
    """CDF of the relay-to-user SNR ``eta_u W^-alpha |g_ud|^2``."""
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    t = scenario.terrestrial
    dist = _dist(scenario, mode)
    scale = t.m_ud * x / (t.Omega_ud * eta_u)
    pdf = scalar_pdf(dist)
    m, alpha = t.m_ud, t.alpha

    def f(r):
        return special.gammainc(m, scale * r**alpha) * pdf(r)

    return min(1.0, _integrate_over_support(f, dist, spec))


def pdf_lambda_ud(x: float, mode: Mode, scenario: ScenarioConfig, eta_u: float, spec: QuadratureSpec = ORACLE_INNER) -> float:
    """Density of the relay-to-user SNR (derivative of :func:`cdf_lambda_ud`)."""
    if x <= 0:
        return 0.0
    t = scenario.terrestrial
    m, a = t.m_ud, t.m_ud / (t.Omega_ud * eta_u)
    dist = _dist(scenario, mode)
    log_front = m * math.log(a) + (m - 1) * math.log(x) - math.lgamma(m)
    pdf = scalar_pdf(dist)
    alpha = t.alpha

    def f(r):
        if r <= 0:
            return 0.0
        ra = r**alpha
        return math.exp(log_front + m * math.log(ra) - a * x * ra) * pdf(r)

    return _integrate_over_support(f, dist, spec)


def distance_moment(mode: Mode, scenario: ScenarioConfig, order: float) -> float:
    """``E[W^order]``; with ``order = m_ud*alpha`` this is the high-SNR
    second-hop constant."""
    dist = _dist(scenario, mode)
    pdf = scalar_pdf(dist)
    return _integrate_over_support(lambda r: r**order * pdf(r), dist, CDF_QUAD)


def cdf_lambda_ud_asymptotic(x: float, mode: Mode, scenario: ScenarioConfig, eta_u: float) -> float:
    """Small-argument form ``(1/m!) (m x/(Omega eta_u))^m E[W^(m alpha)]``."""
    t = scenario.terrestrial
    j2 = _j2(mode, scenario)
    return (t.m_ud * x / (t.Omega_ud * eta_u)) ** t.m_ud / math.factorial(t.m_ud) * j2


@lru_cache(maxsize=256)
def _j2(mode: Mode, scenario: ScenarioConfig) -> float:
    t = scenario.terrestrial
    return distance_moment(mode, scenario, t.m_ud * t.alpha)


# ---------------------------------------------------------------------------
# single-relay two-hop outage Psi
# ---------------------------------------------------------------------------


def psi(gamma_th1: float, mode: Mode, scenario: ScenarioConfig, eta_s: float, eta_u: float) -> float:
    """Single-relay outage ``Pr[Lambda_id < gamma_th1]`` by the Bessel-K series.

    Each term of the multiple sum over antenna indices, first-hop CDF order p,
    binomial indices q and n is accumulated in the log domain; the r-integral
    depends only on ``nu = n - q + 1`` and is computed once per ``nu``.
    """
    return _psi_cached(float(gamma_th1), mode, scenario, float(eta_s), float(eta_u))


@lru_cache(maxsize=4096)
def _psi_cached(g: float, mode: Mode, scenario: ScenarioConfig, eta_s: float, eta_u: float) -> float:
    if g <= 0:
        return 0.0
    if math.isinf(g):
        return 1.0
    sr, t = scenario.sr, scenario.terrestrial
    m = t.m_ud
    a = m / (t.Omega_ud * eta_u)
    theta = sr.decay / eta_s
    log_kernel: dict[int, float] = {}

    def kernel(nu):
        if nu not in log_kernel:
            log_kernel[nu] = _log_kernel(nu, g, theta, a, mode, scenario)
        return log_kernel[nu]

    log_terms = []
    lg, lg1, ltheta = math.log(g), math.log(g + 1.0), math.log(theta)
    for G, coef in sr.series:
        # coef / eta_s^G * Theta^-(G-p) = coef * Theta^p / decay^G
        base = math.log(coef) + math.lgamma(G) - G * math.log(sr.decay) - theta * g
        for p in range(G):
            bp = base - math.lgamma(p + 1) + p * ltheta
            for q in range(p + 1):
                bq = bp + _log_binom(p, q)
                for n in range(m):
                    nu = n - q + 1
                    lk = kernel(nu)
                    if lk == -math.inf:
                        continue
                    val = (
                        bq
                        + _log_binom(m - 1, n)
                        + math.log(2.0)
                        - math.lgamma(m)
                        + (m - nu / 2.0) * math.log(a)
                        + (nu / 2.0) * ltheta
                        + (m + p - (n + q + 1) / 2.0) * lg
                        + ((n + q + 1) / 2.0) * lg1
                        + lk
                    )
                    log_terms.append(val)
    if not log_terms:
        return 1.0
    lt = np.array(log_terms)
    top = lt.max()
    s = math.exp(top) * float(np.sum(np.exp(lt - top)))
    return float(min(1.0, max(0.0, 1.0 - s)))


def _log_binom(n: int, k: int) -> float:
    return math.log(math.comb(n, k))


def _log_kernel(nu: int, g: float, theta: float, a: float, mode: Mode, scenario: ScenarioConfig) -> float:
    t = scenario.terrestrial
    m, alpha = t.m_ud, t.alpha
    dist = _dist(scenario, mode)
    c = 2.0 * math.sqrt(theta * g * (g + 1.0) * a)
    power = (m - nu / 2.0) * alpha

    pdf = scalar_pdf(dist)
    v = abs(nu)

    def log_f(r):
        dens = pdf(r)
        if r <= 0.0 or dens <= 0.0:
            return -math.inf
        ra = r**alpha
        arg = c * math.sqrt(ra)
        kve = special.kve(v, arg) if arg > 0 else math.inf
        if 0.0 < kve < math.inf:
            lk = math.log(kve) - arg
        else:
            lk = float(specfun.log_bessel_k(nu, max(arg, 1e-300)))
        return power * math.log(r) - a * g * ra + lk + math.log(dens)

    lo, hi = dist.support
    vals = [log_f(r) for r in np.linspace(lo, hi, 129)[1:-1]]
    finite = [x for x in vals if x > -math.inf]
    if not finite:
        return -math.inf
    shift = max(finite)

    def f(r):
        lv = log_f(r)
        return math.exp(lv - shift) if lv > -math.inf else 0.0

    val = _integrate_over_support(f, dist, SERIES_QUAD)
    if val <= 0:
        return -math.inf
    return math.log(val) + shift


def psi_oracle(gamma_th1: float, mode: Mode, scenario: ScenarioConfig, eta_s: float, eta_u: float) -> float:
    """Single-relay outage by direct double quadrature.

    ``F_U(g) + int_0^inf F_S(g (x+g+1)/x) f_U(x+g) dx`` with the law of U
    itself an r-integral. Both terms are small at high SNR, so the sum keeps
    its relative accuracy. Independent of the series in :func:`psi`.
    """
    g = float(gamma_th1)
    sr = scenario.sr

    def integrand(x):
        if x <= 0:
            return 0.0
        y = g * (x + g + 1.0) / x
        F = sr_sum_cdf_scaled(y, sr, eta_s)
        if F <= 0:
            return 0.0
        return F * pdf_lambda_ud(x + g, mode, scenario, eta_u, ORACLE_INNER)

    # the first-hop factor switches on around x0; integrate in log x from
    # far below x0 to far into the tail of U, then mop up the remainder
    head = cdf_lambda_ud(g, mode, scenario, eta_u, ORACLE_INNER)
    # accuracy is wanted on the total, which is never smaller than ``head``
    spec = replace(ORACLE_OUTER, abs_tol=max(ORACLE_OUTER.abs_tol, 1e-9 * head))
    x0 = g * (g + 1.0) * sr.decay / eta_s
    s_lo, s_hi = -40.0, math.log(1e6 * max(eta_u, 1.0) / x0)
    knots = list(np.arange(math.ceil(s_lo), s_hi, 2.0)[1:])
    body = specfun.integrate_finite(lambda s: integrand(x0 * math.exp(s)) * x0 * math.exp(s), s_lo, s_hi, spec, points=knots)
    tail = specfun.integrate_semi_infinite(integrand, x0 * math.exp(s_hi), spec)
    val = head + body + tail
    return float(min(1.0, max(0.0, val)))


def psi_asymptotic(gamma_th1: float, mode: Mode, scenario: ScenarioConfig, eta_s: float, eta_u: float) -> float:
    """High-SNR single-relay outage ``F_S(g) + F_U(g)`` with both CDFs in
    their small-argument forms."""
    return float(sr_sum_cdf_small(gamma_th1, scenario.sr, eta_s)) + cdf_lambda_ud_asymptotic(
        gamma_th1, mode, scenario, eta_u
    )


# ---------------------------------------------------------------------------
# scheme-level outage
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OutageResult:
    op_exact: float
    op_asymptotic: float
    terms: dict = field(default_factory=dict)

    @property
    def op_asymptotic_clamped(self) -> float:
        return min(1.0, max(0.0, self.op_asymptotic))


def _layout(query: OutageQuery) -> CacheLayout:
    return replace(query.scenario.cache, scheme=query.scheme)


def op_nc(query: OutageQuery) -> OutageResult:
    sc, M = query.scenario, query.scenario.M
    p = psi(query.gamma_th1, query.mode, sc, query.eta_s, query.eta_u)
    pa = psi_asymptotic(query.gamma_th1, query.mode, sc, query.eta_s, query.eta_u)
    return OutageResult(
        p**M,
        pa**M,
        {"psi": p, "cdf_ud_at_th2": None, "hit_mass": 0.0, "miss_mass": 1.0},
    )


def op_mpc(query: OutageQuery) -> OutageResult:
    sc, M = query.scenario, query.scenario.M
    hm = hit_mass(_layout(query))
    nc = op_nc(query)
    F2 = cdf_lambda_ud(query.gamma_th2, query.mode, sc, query.eta_u)
    F2a = cdf_lambda_ud_asymptotic(query.gamma_th2, query.mode, sc, query.eta_u)
    exact = F2**M * hm.hit + nc.op_exact * hm.miss
    asym = F2a**M * hm.hit + nc.op_asymptotic * hm.miss
    return OutageResult(
        exact,
        asym,
        {"psi": nc.terms["psi"], "cdf_ud_at_th2": F2, "hit_mass": hm.hit, "miss_mass": hm.miss},
    )


def op_uc(query: OutageQuery) -> OutageResult:
    sc = query.scenario
    hm = hit_mass(_layout(query))
    nc = op_nc(query)
    # i.i.d. second hops: every relay's single-hop outage is the same CDF value
    F2 = cdf_lambda_ud(query.gamma_th2, query.mode, sc, query.eta_u)
    F2a = cdf_lambda_ud_asymptotic(query.gamma_th2, query.mode, sc, query.eta_u)
    per = sum(hm.per_relay)
    exact = F2 * per + nc.op_exact * hm.miss
    asym = F2a * per + nc.op_asymptotic * hm.miss
    return OutageResult(
        exact,
        asym,
        {"psi": nc.terms["psi"], "cdf_ud_at_th2": F2, "hit_mass": per, "miss_mass": hm.miss},
    )


def outage(query: OutageQuery) -> OutageResult:
    return {"NC": op_nc, "MPC": op_mpc, "UC": op_uc}[query.scheme](query)


def outage_curve(scenario: ScenarioConfig, snr_db, scheme="NC", mode: Mode = "fully3D") -> list[OutageResult]:
    return [outage(OutageQuery.at_snr_db(scenario, s, scheme, mode)) for s in np.atleast_1d(snr_db)]


# ---------------------------------------------------------------------------
# diversity order
# ---------------------------------------------------------------------------


def diversity_order(scheme, mode: Mode, scenario: ScenarioConfig, fit_window_db=(50.0, 70.0), n_points: int = 11) -> float:
    """Negative log-log slope of the asymptotic outage over a dB window,
    with ``eta_s = eta_u``; least squares over ``n_points >= 5`` SNRs."""
    lo, hi = map(float, fit_window_db)
    if n_points < 5:
        raise ValueError("slope fit needs at least 5 points")
    for _ in range(8):
        snr = np.linspace(lo, hi, n_points)
        op = np.array([outage(OutageQuery.at_snr_db(scenario, s, scheme, mode)).op_asymptotic for s in snr])
        if np.all(np.isfinite(op)) and np.all(op > 1e-290):
            slope = np.polyfit(snr / 10.0, np.log10(op), 1)[0]
            return float(-slope)
        warnings.warn(f"asymptotic outage underflows in [{lo}, {hi}] dB; shifting window down 10 dB")
        lo, hi = lo - 10.0, hi - 10.0
    raise AccuracyError("no usable fit window for diversity order", float("nan"), float("nan"))
