"""Satellite link budget, fading laws and the AF end-to-end SNR.

Noise power is normalised to one, so every power below is a linear SNR scale.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import specfun

BOLTZMANN = 1.38e-23  # J/K
SPEED_OF_LIGHT = 3e8  # m/s
RHO_SCALE = 2.07123


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


class UnsupportedParameterError(ValueError):
    pass


# ---------------------------------------------------------------------------
# satellite link budget
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinkBudget:
    P_s: float = 10.0  # W
    T: float = 300.0  # K
    W: float = 15e6  # Hz
    f_c: float = 2e9  # Hz
    d_u: float = 35_786e3  # m
    theta_u: float = 0.8  # deg, offset from beam centre
    theta_3dB: float = 0.3  # deg
    G_s_db: float = 53.45
    G_u_db: float = 4.8
    square_beam: bool = False

    def __post_init__(self):
        for name in ("P_s", "T", "W", "f_c", "d_u"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("theta_u", "theta_3dB"):
            if not 0 < getattr(self, name) < 90:
                raise ValueError(f"{name} must lie in (0, 90) degrees")

    @property
    def rho_u(self) -> float:
        return RHO_SCALE * math.sin(math.radians(self.theta_u)) / math.sin(math.radians(self.theta_3dB))


def beam_pattern(rho: float) -> float:
    """``J1(rho)/(2 rho) + 36 J3(rho)/rho^3``; equals 1 at boresight."""
    if rho < 1e-4:
        # series: 1/4 - rho^2/32 + ... and 1/48 - rho^2/768 + ...
        return 1.0 - rho**2 * (1 / 32 + 36 / 768)
    return specfun.bessel_j(1, rho) / (2 * rho) + 36.0 * specfun.bessel_j(3, rho) / rho**3


def beam_gain(budget: LinkBudget) -> float:
    """Beam gain toward the UAV, linear.

    The bracket is used as printed (amplitude form) unless
    ``budget.square_beam`` asks for the usual squared power pattern.
    """
    b = beam_pattern(budget.rho_u)
    if budget.square_beam:
        b = b * b
    return float(db_to_linear(budget.G_u_db)) * b


def free_space_amplitude(budget: LinkBudget) -> float:
    return SPEED_OF_LIGHT / (4 * math.pi * budget.f_c * budget.d_u)


def eta_s(budget: LinkBudget) -> float:
    """First-hop SNR scale ``P_s * L_su * G_s * beam_gain`` (noise normalised)."""
    noise = BOLTZMANN * budget.T * budget.W
    gain = float(db_to_linear(budget.G_s_db)) * beam_gain(budget)
    return budget.P_s * gain / noise * free_space_amplitude(budget) ** 2


# ---------------------------------------------------------------------------
# shadowed-Rician first hop
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SrFadingParams:
    """Shadowed-Rician fading of an N-antenna satellite link.

    ``b_su`` is half the scattered power, ``Omega_su`` the LOS power and
    ``m_su`` the (integer) Nakagami parameter of the LOS amplitude.
    """

    m_su: int = 2
    b_su: float = 0.063
    Omega_su: float = 0.0005
    N: int = 2

    def __post_init__(self):
        if int(self.m_su) != self.m_su or self.m_su < 1:
            raise UnsupportedParameterError(f"m_su must be a positive integer, got {self.m_su}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not self.b_su > 0:
            raise ValueError("b_su must be positive")
        if not self.Omega_su >= 0:
            raise ValueError("Omega_su must be non-negative")
        object.__setattr__(self, "m_su", int(self.m_su))
        object.__setattr__(self, "N", int(self.N))

    @property
    def alpha_u(self) -> float:
        two_b = 2 * self.b_su
        return (two_b * self.m_su / (two_b * self.m_su + self.Omega_su)) ** self.m_su / two_b

    @property
    def beta_u(self) -> float:
        return 1.0 / (2 * self.b_su)

    @property
    def delta_u(self) -> float:
        two_b = 2 * self.b_su
        return self.Omega_su / (two_b * (two_b * self.m_su + self.Omega_su))

    @property
    def decay(self) -> float:
        """Exponential rate ``beta_u - delta_u`` of the power density."""
        return self.beta_u - self.delta_u

    def zeta(self, k: int) -> float:
        return (-1) ** k * specfun.pochhammer(1 - self.m_su, k) * self.delta_u**k / math.factorial(k) ** 2

    def xi(self, idx) -> float:
        """Coefficient of one index tuple ``(i_1, ..., i_N)`` of the density series."""
        out = self.alpha_u ** self.N
        for i in idx:
            out *= self.zeta(i)
        partial = 0
        for j in range(1, self.N):
            partial += idx[j - 1]
            out *= specfun.beta(partial + j, idx[j] + 1)
        return out

    @cached_property
    def series(self) -> tuple[tuple[int, float], ...]:
        """``(gamma, coefficient)`` pairs with coefficients of equal
        ``gamma = sum(i) + N`` merged; the density is
        ``sum coef * x**(gamma-1) * exp(-decay*x)``."""
        acc: dict[int, float] = {}
        for idx in itertools.product(range(self.m_su), repeat=self.N):
            g = sum(idx) + self.N
            acc[g] = acc.get(g, 0.0) + self.xi(idx)
        return tuple(sorted(acc.items()))


def sr_sum_pdf(x, p: SrFadingParams):
    """Density of ``||g_su||^2`` summed over the N antennas."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for g, c in p.series:
        out = out + c * x ** (g - 1)
    out = np.where(x >= 0, out * np.exp(-p.decay * x), 0.0)
    return float(out) if out.ndim == 0 else out


def sr_sum_cdf_scaled(x, p: SrFadingParams, eta_s: float):
    """CDF of the first-hop SNR ``eta_s * ||g_su||^2``.

    Uses ``Theta^-(g-p) x^p / eta_s^g = (Theta x)^p / decay^g`` so that no
    power of ``eta_s`` is formed explicitly.
    """
    x = np.asarray(x, dtype=float)
    t = p.decay / eta_s * np.maximum(x, 0.0)
    tail = np.zeros_like(t)
    for g, c in p.series:
        poly = np.zeros_like(t)
        term = np.ones_like(t)
        for k in range(g):
            if k:
                term = term * t / k
            poly = poly + term
        tail = tail + c * math.factorial(g - 1) / p.decay**g * poly
    with np.errstate(over="ignore", invalid="ignore"):
        out = 1.0 - tail * np.exp(-t)
    out = np.where(np.isinf(x), 1.0, np.clip(out, 0.0, 1.0))
    return float(out) if out.ndim == 0 else out


def sr_sum_cdf_small(x, p: SrFadingParams, eta_s: float):
    """Leading small-argument term ``alpha_u^N x^N / (N! eta_s^N)``."""
    x = np.asarray(x, dtype=float)
    out = (p.alpha_u * x / eta_s) ** p.N / math.factorial(p.N)
    return float(out) if out.ndim == 0 else out


def sample_sr_power(p: SrFadingParams, rng: np.random.Generator, size=None):
    """Draw ``||g_su||^2``: per antenna, CN(0, 2b) scatter plus a LOS
    amplitude with Gamma(m, Omega/m) power."""
    shape = () if size is None else ((size,) if np.isscalar(size) else tuple(size))
    full = shape + (p.N,)
    sd = math.sqrt(p.b_su)
    re = sd * rng.standard_normal(full)
    im = sd * rng.standard_normal(full)
    if p.Omega_su > 0:
        re = re + np.sqrt(rng.gamma(p.m_su, p.Omega_su / p.m_su, full))
    out = (re**2 + im**2).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Nakagami-m second hop
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NakagamiParams:
    m_ud: int = 1
    Omega_ud: float = 1.0
    alpha: float = 2.0
    P_u: float = 1.0

    def __post_init__(self):
        if int(self.m_ud) != self.m_ud or self.m_ud < 1:
            raise UnsupportedParameterError(f"m_ud must be a positive integer, got {self.m_ud}")
        if not self.Omega_ud > 0:
            raise ValueError("Omega_ud must be positive")
        if not self.alpha >= 2:
            raise ValueError(f"path-loss exponent must be >= 2, got {self.alpha}")
        object.__setattr__(self, "m_ud", int(self.m_ud))

    @property
    def eta_u(self) -> float:
        return self.P_u


def sample_nakagami_power(p: NakagamiParams, rng: np.random.Generator, size=None):
    out = rng.gamma(p.m_ud, p.Omega_ud / p.m_ud, size)
    return float(out) if np.ndim(out) == 0 else out


def af_end_to_end_snr(lambda_su, lambda_ud):
    """Variable-gain AF end-to-end SNR ``a*b/(a+b+1)``."""
    a = np.asarray(lambda_su, dtype=float)
    b = np.asarray(lambda_ud, dtype=float)
    out = a * b / (a + b + 1.0)
    return float(out) if out.ndim == 0 else out


def lambda_ud(eta_u: float, w, alpha: float, gain):
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise ValueError("UAV-user distance must be positive")
    out = eta_u * w ** (-alpha) * np.asarray(gain, dtype=float)
    return float(out) if out.ndim == 0 else out
