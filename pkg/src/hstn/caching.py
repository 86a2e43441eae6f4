"""Zipf request popularity, MPC/UC placement and relay selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

Scheme = Literal["NC", "MPC", "UC"]
SCHEMES: tuple[Scheme, ...] = ("NC", "MPC", "UC")


@dataclass(frozen=True)
class CacheLayout:
    """Catalogue of ``K`` files, ``C`` slots per relay, ``M`` relays.

    MPC stores files ``1..C`` everywhere; UC stores files
    ``(i-1)C+1 .. iC`` at relay ``i``.
    """

    K: int = 20
    C: int = 2
    M: int = 2
    lam: float = 2.0
    scheme: Scheme = "MPC"

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("catalogue size K must be >= 1")
        if self.M < 1:
            raise ValueError("relay count M must be >= 1")
        if not 0 <= self.C <= self.K:
            raise ValueError(f"need 0 <= C <= K, got C={self.C}, K={self.K}")
        if self.lam < 0:
            raise ValueError("Zipf exponent must be >= 0")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown caching scheme {self.scheme!r}")


def zipf_pmf(layout: CacheLayout) -> np.ndarray:
    k = np.arange(1, layout.K + 1, dtype=float)
    w = k ** (-layout.lam)
    return w / w.sum()


@dataclass(frozen=True)
class HitMass:
    hit: float
    miss: float
    per_relay: tuple[float, ...]


def hit_mass(layout: CacheLayout) -> HitMass:
    """Probability that a request is served from a relay cache.

    ``per_relay`` lists each relay's own share under UC; under MPC every relay
    holds the same files so the tuple repeats the MPC hit mass.
    """
    f = zipf_pmf(layout)
    M, C, K = layout.M, layout.C, layout.K
    if layout.scheme == "NC":
        return HitMass(0.0, 1.0, (0.0,) * M)
    if layout.scheme == "MPC":
        hit = float(f[:C].sum())
        return HitMass(hit, float(f[C:].sum()), (hit,) * M)
    per = tuple(float(f[i * C : min((i + 1) * C, K)].sum()) for i in range(M))
    top = min(M * C, K)
    return HitMass(float(f[:top].sum()), float(f[top:].sum()), per)


def caching_relay(layout: CacheLayout, k):
    """0-based relay holding file ``k`` (1-based) under UC, else -1."""
    k = np.asarray(k)
    idx = (k - 1) // max(layout.C, 1)
    out = np.where((k >= 1) & (k <= layout.M * layout.C), idx, -1)
    return int(out) if out.ndim == 0 else out


def is_cached(layout: CacheLayout, k):
    k = np.asarray(k)
    if layout.scheme == "NC":
        out = np.zeros(k.shape, dtype=bool)
    elif layout.scheme == "MPC":
        out = k <= layout.C
    else:
        out = k <= layout.M * layout.C
    return bool(out) if out.ndim == 0 else out


def sample_requests(layout: CacheLayout, rng: np.random.Generator, size=None):
    """1-based file indices drawn from the Zipf popularity law."""
    return rng.choice(np.arange(1, layout.K + 1), size=size, p=zipf_pmf(layout))


def select_relay(snrs_second_hop, snrs_end_to_end, cached: bool) -> int:
    """Best relay: max second-hop SNR for cached files, max end-to-end SNR
    otherwise. Ties go to the lowest index."""
    a = np.asarray(snrs_second_hop if cached else snrs_end_to_end, dtype=float)
    if a.size == 0:
        raise ValueError("select_relay needs at least one relay")
    return int(np.argmax(a))
