"""3D UAV mobility inside a cylinder of radius R and height H above the user.

Two position processes are modelled:

* ``fully3D``: mixed mobility. Vertical random-waypoint legs between uniform
  altitudes (uniform speed in ``[v_min, v_max]``) alternate with dwell periods;
  while dwelling the UAV random-walks horizontally with probability ``p_s``
  per slot.
* ``fixedHeight``: altitude pinned at ``H``; horizontal random walk only.

Vertical motion is simulated in continuous time and observed at slot
boundaries, so the slot-sampled altitude has exactly the stationary law of the
continuous process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, Optional

import numpy as np

Mode = Literal["fully3D", "fixedHeight"]
FULLY_3D: Mode = "fully3D"
FIXED_HEIGHT: Mode = "fixedHeight"
MODES = (FULLY_3D, FIXED_HEIGHT)

Boundary = Literal["stay", "resample", "reflect"]


def check_mode(mode: str) -> Mode:
    if mode not in MODES:
        raise ValueError(f"unknown mobility mode {mode!r}; expected one of {MODES}")
    return mode  # type: ignore[return-value]


@dataclass(frozen=True)
class MobilityParams:
    """Geometry and timing of the mobility model.

    ``tau_min``/``tau_max`` left as ``None`` are derived from ``p_s`` so that
    the long-run dwelling fraction equals ``p_s`` (uniform dwell on
    ``[0, 2 E[T_s]]`` with ``E[T_s] = p_s/(1-p_s) E[T_m]``).

    ``boundary`` selects what happens when a horizontal step would leave the
    disk: ``stay`` rejects the step (keeps the uniform-disk stationary law
    exact), ``resample`` redraws the step, ``reflect`` mirrors it radially.
    """

    H: float = 80.0
    R: float = 100.0
    R_prime: float = 40.0
    v_min: float = 0.1
    v_max: float = 30.0
    tau_min: Optional[float] = None
    tau_max: Optional[float] = None
    p_s: float = 0.5
    slot_duration: float = 1.0
    boundary: Boundary = "stay"

    def __post_init__(self):
        if not 0 < self.H < self.R:
            raise ValueError(f"need 0 < H < R, got H={self.H}, R={self.R}")
        if not 0 < self.v_min < self.v_max:
            raise ValueError(f"need 0 < v_min < v_max, got [{self.v_min}, {self.v_max}]")
        if not 0 <= self.p_s <= 1:
            raise ValueError(f"p_s must lie in [0, 1], got {self.p_s}")
        if not self.R_prime > 0:
            raise ValueError("R_prime must be positive")
        if not self.slot_duration > 0:
            raise ValueError("slot_duration must be positive")
        if (self.tau_min is None) != (self.tau_max is None):
            raise ValueError("set both tau_min and tau_max, or neither")
        if self.tau_min is not None and not 0 <= self.tau_min <= self.tau_max:
            raise ValueError(f"need 0 <= tau_min <= tau_max, got [{self.tau_min}, {self.tau_max}]")
        if self.boundary not in ("stay", "resample", "reflect"):
            raise ValueError(f"unknown boundary rule {self.boundary!r}")

    @property
    def dwell_range(self) -> tuple[float, float]:
        if self.tau_min is not None:
            return float(self.tau_min), float(self.tau_max)
        if self.p_s >= 1.0:
            return math.inf, math.inf
        mean = self.p_s / (1.0 - self.p_s) * mean_movement_time(self)
        return 0.0, 2.0 * mean

    @property
    def max_distance(self) -> float:
        return math.hypot(self.R, self.H)


def mean_movement_time(params: MobilityParams) -> float:
    """Mean duration of one vertical leg, ``ln(v_max/v_min)/(v_max-v_min) * H/3``."""
    v0, v1 = params.v_min, params.v_max
    return math.log(v1 / v0) / (v1 - v0) * params.H / 3.0


# ---------------------------------------------------------------------------
# steady-state densities
# ---------------------------------------------------------------------------


def altitude_pdf(x, params: MobilityParams):
    x = np.asarray(x, dtype=float)
    H = params.H
    static = 1.0 / H
    moving = -6.0 * x**2 / H**3 + 6.0 * x / H**2
    out = np.where((x >= 0) & (x <= H), params.p_s * static + (1 - params.p_s) * moving, 0.0)
    return float(out) if out.ndim == 0 else out


def altitude_cdf(x, params: MobilityParams):
    x = np.clip(np.asarray(x, dtype=float), 0.0, params.H)
    u = x / params.H
    out = params.p_s * u + (1 - params.p_s) * (3 * u**2 - 2 * u**3)
    return float(out) if out.ndim == 0 else out


def range_pdf(z, params: MobilityParams):
    z = np.asarray(z, dtype=float)
    out = np.where((z >= 0) & (z <= params.R), 2.0 * z / params.R**2, 0.0)
    return float(out) if out.ndim == 0 else out


def range_cdf(z, params: MobilityParams):
    z = np.clip(np.asarray(z, dtype=float), 0.0, params.R)
    out = z**2 / params.R**2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DistanceDistribution:
    """Law of the UAV-to-user distance W for one mobility mode."""

    mode: Mode
    params: MobilityParams

    def __post_init__(self):
        check_mode(self.mode)

    @property
    def support(self) -> tuple[float, float]:
        lo = 0.0 if self.mode == FULLY_3D else self.params.H
        return lo, self.params.max_distance

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Interior joints of the piecewise density."""
        if self.mode == FULLY_3D:
            return (self.params.H, self.params.R)
        return ()

    def pdf(self, w):
        return distance_pdf(w, self)

    def cdf(self, w):
        return distance_cdf(w, self)


def _static_pieces(w, H, R):
    lo = 2 * w**2 / (R**2 * H)
    mid = 2 * w / R**2
    d = np.sqrt(np.maximum(w**2 - R**2, 0.0))
    hi = 2 * w / R**2 - 2 * w * d / (R**2 * H)
    return lo, mid, hi


def _moving_pieces(w, H, R):
    lo = 6 * w**3 / (R**2 * H**2) - 4 * w**4 / (R**2 * H**3)
    mid = 2 * w / R**2
    e = np.maximum(w**2 - R**2, 0.0)
    hi = 2 * w / R**2 - 6 * w * e / (R**2 * H**2) + 4 * w * e**1.5 / (R**2 * H**3)
    return lo, mid, hi


def distance_pdf(w, dist: DistanceDistribution):
    """Density of the UAV-to-user distance; zero outside the support."""
    w = np.asarray(w, dtype=float)
    p = dist.params
    H, R, wmax = p.H, p.R, p.max_distance
    if dist.mode == FIXED_HEIGHT:
        out = np.where((w >= H) & (w <= wmax), 2 * w / R**2, 0.0)
        return float(out) if out.ndim == 0 else out
    s_lo, s_mid, s_hi = _static_pieces(w, H, R)
    m_lo, m_mid, m_hi = _moving_pieces(w, H, R)
    lo = p.p_s * s_lo + (1 - p.p_s) * m_lo
    mid = p.p_s * s_mid + (1 - p.p_s) * m_mid
    hi = p.p_s * s_hi + (1 - p.p_s) * m_hi
    out = np.select(
        [(w >= 0) & (w < H), (w >= H) & (w < R), (w >= R) & (w <= wmax)],
        [lo, mid, hi],
        0.0,
    )
    return float(out) if out.ndim == 0 else out


def distance_cdf(w, dist: DistanceDistribution):
    """Closed-form CDF of the distance (antiderivative of :func:`distance_pdf`)."""
    p = dist.params
    H, R, wmax = p.H, p.R, p.max_distance
    w = np.clip(np.asarray(w, dtype=float), 0.0, wmax)
    if dist.mode == FIXED_HEIGHT:
        out = np.clip((w**2 - H**2) / R**2, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out
    R2, H2 = R**2, H**2
    e = np.maximum(w**2 - R2, 0.0)
    # static component
    s_H = 2 * H**3 / (3 * R2 * H)
    s_R = s_H + (R2 - H2) / R2
    s = np.select(
        [w < H, w < R],
        [2 * w**3 / (3 * R2 * H), s_H + (w**2 - H2) / R2],
        s_R + e / R2 - 2 * e**1.5 / (3 * R2 * H),
    )
    # moving component
    m_H = 3 * H2 / (2 * R2) - 4 * H2 / (5 * R2)
    m_R = m_H + (R2 - H2) / R2
    m = np.select(
        [w < H, w < R],
        [3 * w**4 / (2 * R2 * H2) - 4 * w**5 / (5 * R2 * H**3), m_H + (w**2 - H2) / R2],
        m_R + e / R2 - 1.5 * e**2 / (R2 * H2) + 0.8 * e**2.5 / (R2 * H**3),
    )
    out = np.clip(p.p_s * s + (1 - p.p_s) * m, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


_GRID_SIZE = 4096


def inverse_cdf_table(dist: DistanceDistribution, n: int = _GRID_SIZE):
    """(cdf, w) grid for inverse-transform sampling; cdf strictly increasing."""
    lo, hi = dist.support
    w = np.linspace(lo, hi, n)
    F = distance_cdf(w, dist)
    F[0], F[-1] = 0.0, 1.0
    keep = np.concatenate([[True], np.diff(F) > 0])
    return F[keep], w[keep]


def sample_steady_distance(dist: DistanceDistribution, rng: np.random.Generator, size=None):
    """Draw distances from the steady-state law by inverse-CDF interpolation."""
    F, w = inverse_cdf_table(dist)
    u = rng.random(size)
    out = np.interp(u, F, w)
    return float(out) if np.ndim(out) == 0 else out


def distance_quantile(q, dist: DistanceDistribution):
    F, w = inverse_cdf_table(dist)
    out = np.interp(q, F, w)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# position process
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UavState:
    """One UAV. ``moving`` selects the phase; ``remaining`` is the dwell clock,
    ``target``/``velocity`` describe the active vertical leg."""

    h: float
    z: tuple[float, float]
    moving: bool = False
    remaining: float = 0.0
    target: float = 0.0
    velocity: float = 0.0

    @property
    def horizontal_range(self) -> float:
        return math.hypot(*self.z)

    def distance(self) -> float:
        return math.sqrt(self.h**2 + self.z[0] ** 2 + self.z[1] ** 2)


class Fleet:
    """Array-of-UAVs state advanced in place by :func:`advance`.

    All arrays share one shape (e.g. ``(chains, M)``).
    """

    __slots__ = ("h", "zx", "zy", "moving", "remaining", "target", "velocity")

    def __init__(self, h, zx, zy, moving, remaining, target, velocity):
        self.h = np.asarray(h, dtype=float)
        self.zx = np.asarray(zx, dtype=float)
        self.zy = np.asarray(zy, dtype=float)
        self.moving = np.asarray(moving, dtype=bool)
        self.remaining = np.asarray(remaining, dtype=float)
        self.target = np.asarray(target, dtype=float)
        self.velocity = np.asarray(velocity, dtype=float)

    @classmethod
    def from_states(cls, states):
        states = list(states)
        return cls(
            [s.h for s in states],
            [s.z[0] for s in states],
            [s.z[1] for s in states],
            [s.moving for s in states],
            [s.remaining for s in states],
            [s.target for s in states],
            [s.velocity for s in states],
        )

    def to_states(self) -> list[UavState]:
        return [
            UavState(
                float(self.h.flat[i]),
                (float(self.zx.flat[i]), float(self.zy.flat[i])),
                bool(self.moving.flat[i]),
                float(self.remaining.flat[i]),
                float(self.target.flat[i]),
                float(self.velocity.flat[i]),
            )
            for i in range(self.h.size)
        ]

    def copy(self) -> "Fleet":
        return Fleet(*(getattr(self, k).copy() for k in self.__slots__))

    @property
    def shape(self):
        return self.h.shape

    def horizontal_range(self):
        return np.hypot(self.zx, self.zy)

    def distance(self):
        return np.sqrt(self.h**2 + self.zx**2 + self.zy**2)


def _uniform_disk(rng, radius, shape):
    r = radius * np.sqrt(rng.random(shape))
    phi = 2 * np.pi * rng.random(shape)
    return r * np.cos(phi), r * np.sin(phi)


def initial_fleet(shape, params: MobilityParams, mode: Mode, rng: np.random.Generator) -> Fleet:
    """Start positions: uniform in the disk, uniform altitude, dwelling."""
    check_mode(mode)
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    zx, zy = _uniform_disk(rng, params.R, shape)
    if mode == FIXED_HEIGHT:
        h = np.full(shape, params.H)
        remaining = np.zeros(shape)
    else:
        h = params.H * rng.random(shape)
        lo, hi = params.dwell_range
        remaining = _dwell(rng, lo, hi, shape)
    zeros = np.zeros(shape)
    return Fleet(h, zx, zy, np.zeros(shape, dtype=bool), remaining, zeros, zeros.copy())


def _dwell(rng, lo, hi, shape):
    if math.isinf(hi):
        return np.full(shape, np.inf)
    return lo + (hi - lo) * rng.random(shape)


def _horizontal(fleet: Fleet, params: MobilityParams, eligible, rng):
    shape = fleet.shape
    move = eligible & (rng.random(shape) < params.p_s)
    idx = np.flatnonzero(move)
    if idx.size == 0:
        return
    zx, zy = fleet.zx.reshape(-1), fleet.zy.reshape(-1)
    ux, uy = _uniform_disk(rng, params.R_prime, idx.size)
    nx, ny = zx[idx] + ux, zy[idx] + uy
    R2 = params.R * params.R
    if params.boundary == "stay":
        ok = nx * nx + ny * ny <= R2
        idx, nx, ny = idx[ok], nx[ok], ny[ok]
    elif params.boundary == "resample":
        bad = np.flatnonzero(nx * nx + ny * ny > R2)
        while bad.size:
            rx, ry = _uniform_disk(rng, params.R_prime, bad.size)
            nx[bad] = zx[idx[bad]] + rx
            ny[bad] = zy[idx[bad]] + ry
            bad = bad[nx[bad] ** 2 + ny[bad] ** 2 > R2]
    else:  # reflect
        r = np.hypot(nx, ny)
        scale = np.where(r > params.R, (2 * params.R - r) / np.maximum(r, 1e-300), 1.0)
        nx, ny = nx * scale, ny * scale
    zx[idx] = nx
    zy[idx] = ny
    fleet.zx, fleet.zy = zx.reshape(shape), zy.reshape(shape)


def _vertical(fleet: Fleet, params: MobilityParams, rng):
    budget = np.full(fleet.shape, params.slot_duration)
    lo, hi = params.dwell_range
    eps = 1e-12 * params.slot_duration
    # every pass either exhausts a UAV's budget or completes one phase
    while True:
        active = budget > eps
        if not active.any():
            break
        dwelling = active & ~fleet.moving
        if dwelling.any():
            use = np.where(dwelling, np.minimum(fleet.remaining, budget), 0.0)
            fleet.remaining = fleet.remaining - use
            budget = budget - use
            done = dwelling & (fleet.remaining <= eps)
            if done.any():
                n = int(done.sum())
                fleet.target[done] = params.H * rng.random(n)
                fleet.velocity[done] = params.v_min + (params.v_max - params.v_min) * rng.random(n)
                fleet.moving[done] = True
                fleet.remaining[done] = 0.0
        moving = (budget > eps) & fleet.moving
        if moving.any():
            gap = fleet.target - fleet.h
            need = np.abs(gap) / np.where(moving, fleet.velocity, 1.0)
            use = np.where(moving, np.minimum(need, budget), 0.0)
            fleet.h = fleet.h + np.sign(gap) * fleet.velocity * use
            budget = budget - use
            arrived = moving & (need <= use + eps)
            if arrived.any():
                n = int(arrived.sum())
                fleet.h[arrived] = fleet.target[arrived]
                fleet.moving[arrived] = False
                fleet.remaining[arrived] = _dwell(rng, lo, hi, n)


def advance(fleet: Fleet, params: MobilityParams, mode: Mode, rng: np.random.Generator) -> Fleet:
    """Advance every UAV by one slot (in place); returns ``fleet``."""
    if mode == FIXED_HEIGHT:
        _horizontal(fleet, params, np.ones(fleet.shape, dtype=bool), rng)
        fleet.h = np.full(fleet.shape, params.H)
        return fleet
    check_mode(mode)
    # horizontal walk only while dwelling at the start of the slot
    _horizontal(fleet, params, ~fleet.moving, rng)
    _vertical(fleet, params, rng)
    fleet.h = np.clip(fleet.h, 0.0, params.H)
    return fleet


def step(state: UavState, params: MobilityParams, mode: Mode, rng: np.random.Generator) -> UavState:
    """One-slot transition of a single UAV; ``state`` is not modified."""
    fleet = Fleet.from_states([state])
    advance(fleet, params, mode, rng)
    return fleet.to_states()[0]


def run_steps(fleet: Fleet, params: MobilityParams, mode: Mode, rng, n_steps: int) -> Fleet:
    for _ in range(int(n_steps)):
        advance(fleet, params, mode, rng)
    return fleet


def with_dwell_for(params: MobilityParams, p_s: float) -> MobilityParams:
    """Copy of ``params`` with stay probability ``p_s`` and auto-derived dwell range."""
    return replace(params, p_s=p_s, tau_min=None, tau_max=None)


def scalar_pdf(dist: DistanceDistribution):
    """Plain-float version of :func:`distance_pdf` for quadrature callbacks."""
    p = dist.params
    H, R, ps = p.H, p.R, p.p_s
    wmax = p.max_distance
    R2, H2, H3 = R * R, H * H, H**3
    if dist.mode == FIXED_HEIGHT:

        def pdf(w):
            return 2.0 * w / R2 if H <= w <= wmax else 0.0

        return pdf

    def pdf(w):
        if w < 0.0 or w > wmax:
            return 0.0
        if w < H:
            st = 2.0 * w * w / (R2 * H)
            mo = 6.0 * w**3 / (R2 * H2) - 4.0 * w**4 / (R2 * H3)
            return ps * st + (1.0 - ps) * mo
        if w < R:
            return 2.0 * w / R2
        e = max(w * w - R2, 0.0)
        st = 2.0 * w / R2 - 2.0 * w * math.sqrt(e) / (R2 * H)
        mo = 2.0 * w / R2 - 6.0 * w * e / (R2 * H2) + 4.0 * w * e**1.5 / (R2 * H3)
        return ps * st + (1.0 - ps) * mo

    return pdf
