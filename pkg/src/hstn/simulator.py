"""Seeded Monte Carlo estimate of the outage probability.

Trials are produced by independent Markov chains of UAV positions.  Each chain
is warmed up for ``warmup_steps`` slots, then yields one trial every ``thin``
slots.  Chains are grouped into fixed-size blocks and every block draws from
its own random substream keyed by ``(seed, block index)``, so the result does
not depend on how blocks are spread over worker processes.

With ``rewarm_every_trial`` every trial gets its own freshly warmed chain
(one trial per chain), which is the exact but expensive protocol.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .caching import SCHEMES, caching_relay, sample_requests
from .channel import af_end_to_end_snr, sample_nakagami_power, sample_sr_power
from .mobility import Fleet, Mode, advance, check_mode, initial_fleet, run_steps
from .scenario import OutageQuery, ScenarioConfig

BLOCK_CHAINS = 250


@dataclass(frozen=True)
class SimPlan:
    """Monte Carlo budget.

    ``chains`` and ``thin`` only matter without ``rewarm_every_trial``: the
    trials are spread over ``chains`` chains, consecutive trials of one chain
    being ``thin`` slots apart.
    """

    trials: int = 100_000
    warmup_steps: int = 10_000
    rewarm_every_trial: bool = False
    seed: int = 0
    workers: int = 1
    chains: int = 1000
    thin: int = 25

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.chains < 1 or self.thin < 1:
            raise ValueError("chains and thin must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def trials_per_chain(self) -> int:
        if self.rewarm_every_trial:
            return 1
        return math.ceil(self.trials / min(self.chains, self.trials))

    @property
    def n_chains(self) -> int:
        return math.ceil(self.trials / self.trials_per_chain)


@dataclass(frozen=True)
class SimEstimate:
    op_hat: float
    stderr: float
    n_events: int
    trials: int

    @classmethod
    def from_indicators(cls, outage) -> "SimEstimate":
        outage = np.asarray(outage, dtype=bool)
        n = outage.size
        k = int(outage.sum())
        p = k / n
        return cls(p, math.sqrt(p * (1 - p) / n), k, n)


@dataclass(frozen=True)
class TrialOutcome:
    requested_file: int
    hit: bool
    selected_relay: int
    outage: dict


@dataclass
class TrialSamples:
    """Per-trial random inputs, shared by every SNR and scheme.

    ``distance``, ``g_su`` and ``g_ud`` have shape ``(trials, M)``.
    """

    distance: np.ndarray
    g_su: np.ndarray
    g_ud: np.ndarray
    requested: np.ndarray

    @property
    def trials(self) -> int:
        return self.requested.size

    @classmethod
    def concatenate(cls, parts: Sequence["TrialSamples"]) -> "TrialSamples":
        return cls(*(np.concatenate([getattr(p, k) for p in parts]) for k in ("distance", "g_su", "g_ud", "requested")))

    def head(self, n: int) -> "TrialSamples":
        return TrialSamples(self.distance[:n], self.g_su[:n], self.g_ud[:n], self.requested[:n])


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Counter-based (Philox) stream for one block of chains."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _block_layout(plan: SimPlan) -> list[tuple[int, int]]:
    """(block index, chain count) for every block."""
    n = plan.n_chains
    return [(b, min(BLOCK_CHAINS, n - b * BLOCK_CHAINS)) for b in range(math.ceil(n / BLOCK_CHAINS))]


def _simulate_block(args) -> TrialSamples:
    plan, scenario, mode, block, n_chains = args
    rng = block_rng(plan.seed, block)
    M = scenario.M
    mob = scenario.mobility
    fleet = initial_fleet((n_chains, M), mob, mode, rng)
    run_steps(fleet, mob, mode, rng, plan.warmup_steps)
    tpc = plan.trials_per_chain
    thin = 1 if plan.rewarm_every_trial else plan.thin
    dist = np.empty((tpc, n_chains, M))
    for j in range(tpc):
        # at least one slot passes between the two hops of a trial
        run_steps(fleet, mob, mode, rng, thin)
        dist[j] = fleet.distance()
    dist = dist.transpose(1, 0, 2).reshape(n_chains * tpc, M)
    n = dist.shape[0]
    g_su = sample_sr_power(scenario.sr, rng, (n, M))
    g_ud = sample_nakagami_power(scenario.terrestrial, rng, (n, M))
    k = sample_requests(scenario.cache, rng, n)
    return TrialSamples(dist, g_su, g_ud, k)


def draw_samples(plan: SimPlan, scenario: ScenarioConfig, mode: Mode) -> TrialSamples:
    """Run the mobility chains and draw all per-trial randomness."""
    check_mode(mode)
    jobs = [(plan, scenario, mode, b, n) for b, n in _block_layout(plan)]
    if plan.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            parts = list(pool.map(_simulate_block, jobs))
    else:
        parts = [_simulate_block(j) for j in jobs]
    return TrialSamples.concatenate(parts).head(plan.trials)


def outage_indicators(samples: TrialSamples, scenario: ScenarioConfig, eta_s: float, eta_u: float, scheme: str):
    """Boolean outage per trial for one scheme, plus the selected relay."""
    lam_su = eta_s * samples.g_su
    lam_ud = eta_u * samples.distance ** (-scenario.terrestrial.alpha) * samples.g_ud
    lam_id = af_end_to_end_snr(lam_su, lam_ud)
    g1, g2 = scenario.gamma_th1, scenario.gamma_th2
    rows = np.arange(samples.trials)
    relay = np.argmax(lam_id, axis=1)
    out = lam_id[rows, relay] < g1
    k = samples.requested
    if scheme == "MPC":
        hit = k <= scenario.cache.C
        best = np.argmax(lam_ud, axis=1)
        relay = np.where(hit, best, relay)
        out = np.where(hit, lam_ud[rows, best] < g2, out)
    elif scheme == "UC":
        owner = caching_relay(scenario.cache, k)
        hit = owner >= 0
        own = np.where(hit, owner, 0)
        relay = np.where(hit, own, relay)
        out = np.where(hit, lam_ud[rows, own] < g2, out)
    elif scheme != "NC":
        raise ValueError(f"unknown caching scheme {scheme!r}")
    return out, relay


def run_trial(scheme, mode: Mode, scenario: ScenarioConfig, states: Fleet, rng: np.random.Generator, eta_s: float, eta_u: float) -> TrialOutcome:
    """One two-phase transmission from warmed-up UAV states.

    ``states`` (a :class:`Fleet` of M UAVs) is advanced one slot in place so
    the second hop sees the positions at ``t + 1``.
    """
    M = scenario.M
    k = int(sample_requests(scenario.cache, rng))
    advance(states, scenario.mobility, mode, rng)
    samples = TrialSamples(
        states.distance().reshape(1, M),
        np.asarray(sample_sr_power(scenario.sr, rng, (1, M))),
        np.asarray(sample_nakagami_power(scenario.terrestrial, rng, (1, M))),
        np.array([k]),
    )
    outage, relay = {}, 0
    for s in SCHEMES:
        o, r = outage_indicators(samples, scenario, eta_s, eta_u, s)
        outage[s] = bool(o[0])
        if s == scheme:
            relay = int(r[0])
    if scheme == "MPC":
        hit = k <= scenario.cache.C
    elif scheme == "UC":
        hit = k <= scenario.cache.M * scenario.cache.C
    else:
        hit = False
    return TrialOutcome(k, hit, relay, outage)


def estimate_op(plan: SimPlan, query: OutageQuery, samples: TrialSamples | None = None) -> SimEstimate:
    if samples is None:
        samples = draw_samples(plan, query.scenario, query.mode)
    out, _ = outage_indicators(samples, query.scenario, query.eta_s, query.eta_u, query.scheme)
    return SimEstimate.from_indicators(out)


def estimate_curve(
    plan: SimPlan,
    scenario: ScenarioConfig,
    mode: Mode,
    snr_db: Iterable[float],
    schemes: Iterable[str] = SCHEMES,
    eta_s_db: float | None = None,
) -> dict:
    """``{(scheme, snr_db): SimEstimate}`` from one shared set of trials."""
    samples = draw_samples(plan, scenario, mode)
    out = {}
    for s in snr_db:
        q = OutageQuery.at_snr_db(scenario, s, "NC", mode, eta_s_db)
        for scheme in schemes:
            ind, _ = outage_indicators(samples, scenario, q.eta_s, q.eta_u, scheme)
            out[scheme, float(s)] = SimEstimate.from_indicators(ind)
    return out


def env_workers(default: int = 1) -> int:
    v = os.environ.get("HSTN_WORKERS")
    if v is None or v == "":
        return default
    n = int(v)
    if n < 1:
        raise ValueError("HSTN_WORKERS must be >= 1")
    return n


def with_seed(plan: SimPlan, seed: int) -> SimPlan:
    return replace(plan, seed=seed)


__all__ = [
    "SimPlan",
    "SimEstimate",
    "TrialOutcome",
    "TrialSamples",
    "draw_samples",
    "estimate_curve",
    "estimate_op",
    "outage_indicators",
    "run_trial",
    "block_rng",
    "env_workers",
]
