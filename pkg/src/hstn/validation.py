"""Cross-validation checks between the closed forms, the asymptotes, the
numerical oracles and the simulator.

Each check returns a :class:`CheckResult`; ``run_all`` is what ``hstn --check``
executes.  The tolerances are the published acceptance thresholds.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from .analysis import diversity_order, outage, psi, psi_oracle
from .caching import SCHEMES
from .channel import sample_nakagami_power, sample_sr_power, sr_sum_cdf_scaled
from .mobility import (
    MODES,
    DistanceDistribution,
    altitude_cdf,
    distance_cdf,
    initial_fleet,
    range_cdf,
    run_steps,
)
from .scenario import OutageQuery, ScenarioConfig
from .simulator import SimEstimate, SimPlan, block_rng, draw_samples, outage_indicators

MIN_EXPECTED_EVENTS = 50


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.1f} s)"


def _timed(name, fn):
    t0 = time.perf_counter()
    passed, detail = fn()
    return CheckResult(name, bool(passed), detail, time.perf_counter() - t0)


# 1 -------------------------------------------------------------------------


def psi_oracle_check(snr_db=(10.0, 20.0, 30.0), triplets=((1, 2, 1), (2, 2, 1), (2, 2, 2)), rel_tol=1e-4, base=None):
    """``triplets`` are ``(N, m_su, m_ud)``; compared on both Psi and 1 - Psi."""
    base = base or ScenarioConfig()

    def body():
        worst = worst_c = 0.0
        for N, m_su, m_ud in triplets:
            sc = replace(base, sr=replace(base.sr, N=N, m_su=m_su), terrestrial=replace(base.terrestrial, m_ud=m_ud))
            for mode in MODES:
                for s in snr_db:
                    q = OutageQuery.at_snr_db(sc, s, "NC", mode)
                    a = psi(sc.gamma_th1, mode, sc, q.eta_s, q.eta_u)
                    b = psi_oracle(sc.gamma_th1, mode, sc, q.eta_s, q.eta_u)
                    worst = max(worst, abs(a - b) / abs(b))
                    if 1 - b > 1e-9:  # complement below that is rounding noise
                        worst_c = max(worst_c, abs(a - b) / (1 - b))
        return worst < rel_tol, f"max rel diff {worst:.2e} (tol {rel_tol:g}); on 1 - psi {worst_c:.2e}"

    return _timed("psi closed form vs double-integral oracle", body)


# 2 -------------------------------------------------------------------------


def sim_agreement_check(seeds=range(20), snr_db=(10.0, 20.0, 30.0), trials=100_000, min_pass_rate=0.95, base=None, plan=None):
    """Simulator vs exact OP over ``seeds``; only comparisons where both
    ``n*p`` and ``n*(1-p)`` reach 50 count."""
    base = base or ScenarioConfig()
    plan = plan or SimPlan(trials=trials)

    def body():
        exact = {}
        for mode in MODES:
            for scheme in SCHEMES:
                for s in snr_db:
                    exact[scheme, mode, s] = outage(OutageQuery.at_snr_db(base, s, scheme, mode)).op_exact
        n_cmp = n_ok = 0
        for seed in seeds:
            p = replace(plan, seed=int(seed))
            for mode in MODES:
                samples = draw_samples(p, base, mode)
                for s in snr_db:
                    q = OutageQuery.at_snr_db(base, s, "NC", mode)
                    for scheme in SCHEMES:
                        pe = exact[scheme, mode, s]
                        if min(p.trials * pe, p.trials * (1 - pe)) < MIN_EXPECTED_EVENTS:
                            continue
                        out, _ = outage_indicators(samples, base, q.eta_s, q.eta_u, scheme)
                        est = SimEstimate.from_indicators(out)
                        n_cmp += 1
                        n_ok += abs(est.op_hat - pe) <= 3 * est.stderr
        rate = n_ok / n_cmp if n_cmp else 0.0
        return n_cmp > 0 and rate >= min_pass_rate, f"{n_ok}/{n_cmp} comparisons within 3 stderr ({rate:.1%}, need {min_pass_rate:.0%})"

    return _timed("simulation vs analysis", body)


# 3 -------------------------------------------------------------------------

DIVERSITY_CASES = (
    ("NC", (2, 2, 1), 2.0),
    ("MPC", (2, 2, 1), 2.0),
    ("UC", (2, 2, 1), 1.0),
    ("MPC", (2, 2, 2), 4.0),
    ("UC", (2, 2, 2), 2.0),
)


def diversity_check(tol=0.05, window=(50.0, 70.0), base=None):
    """Cases are ``(scheme, (M, N, m_ud), expected slope)``."""
    base = base or ScenarioConfig()

    def body():
        bad, worst = [], 0.0
        for scheme, (M, N, m_ud), want in DIVERSITY_CASES:
            sc = base.with_triplet(M, N, m_ud)
            for mode in MODES:
                d = diversity_order(scheme, mode, sc, window)
                worst = max(worst, abs(d - want))
                if abs(d - want) > tol:
                    bad.append(f"{scheme}{(M, N, m_ud)} {mode}: {d:.3f} vs {want:g}")
        return not bad, "; ".join(bad) or f"max |slope - expected| {worst:.3f} (tol {tol:g})"

    return _timed("diversity orders", body)


# 4 / 5 ---------------------------------------------------------------------


def _grid_ops(sc, snr_db):
    return {
        (scheme, mode, s): outage(OutageQuery.at_snr_db(sc, s, scheme, mode)).op_exact
        for scheme in SCHEMES
        for mode in MODES
        for s in snr_db
    }


def scheme_ordering_check(snr_db=tuple(range(0, 71, 2)), lambdas=(0.7, 2.0), triplets=((2, 2, 1), (2, 2, 2)), high_snr_db=(60.0, 70.0), base=None, rtol=1e-12):
    """MPC <= NC and MPC <= UC everywhere; UC >= NC at high SNR for {2,2,1}."""
    base = base or ScenarioConfig()

    def body():
        bad = []
        for lam in lambdas:
            for trip in triplets:
                sc = base.with_triplet(*trip).with_lambda(lam)
                op = _grid_ops(sc, snr_db)
                for mode in MODES:
                    for s in snr_db:
                        mpc, nc, uc = (op[k, mode, s] for k in ("MPC", "NC", "UC"))
                        if mpc > nc * (1 + rtol) or mpc > uc * (1 + rtol):
                            bad.append(f"lam={lam} {trip} {mode} {s} dB")
        for lam in lambdas:
            sc = base.with_triplet(2, 2, 1).with_lambda(lam)
            for mode in MODES:
                for s in high_snr_db:
                    q = OutageQuery.at_snr_db
                    if outage(q(sc, s, "UC", mode)).op_exact < outage(q(sc, s, "NC", mode)).op_exact:
                        bad.append(f"UC<NC lam={lam} {mode} {s} dB")
        return not bad, "; ".join(bad[:5]) or f"no violations on {len(snr_db)} SNR points x {len(lambdas)} lambdas x {len(triplets)} triplets"

    return _timed("scheme ordering", body)


def mode_ordering_check(snr_db=tuple(range(0, 71, 2)), lambdas=(0.7, 2.0), triplets=((2, 2, 1), (2, 2, 2)), base=None, rtol=1e-12):
    base = base or ScenarioConfig()

    def body():
        bad = []
        for lam in lambdas:
            for trip in triplets:
                sc = base.with_triplet(*trip).with_lambda(lam)
                op = _grid_ops(sc, snr_db)
                for scheme in SCHEMES:
                    for s in snr_db:
                        if op[scheme, "fully3D", s] > op[scheme, "fixedHeight", s] * (1 + rtol):
                            bad.append(f"{scheme} lam={lam} {trip} {s} dB")
        return not bad, "; ".join(bad[:5]) or "fully3D <= fixedHeight at every grid point"

    return _timed("mode ordering", body)


# 6 -------------------------------------------------------------------------


def lambda_sensitivity_check(snr_db=30.0, triplet=(2, 2, 2), base=None):
    base = base or ScenarioConfig()

    def body():
        sc = base.with_triplet(*triplet)
        bad, parts = [], []
        for mode in MODES:
            r = {}
            for scheme in ("MPC", "UC"):
                lo = outage(OutageQuery.at_snr_db(sc.with_lambda(0.7), snr_db, scheme, mode)).op_exact
                hi = outage(OutageQuery.at_snr_db(sc.with_lambda(2.0), snr_db, scheme, mode)).op_exact
                r[scheme] = lo / hi
            parts.append(f"{mode}: MPC {r['MPC']:.9g} vs UC {r['UC']:.9g}")
            if not r["MPC"] > r["UC"]:
                bad.append(mode)
        return not bad, "; ".join(parts)

    return _timed("lambda sensitivity", body)


# 7 -------------------------------------------------------------------------


def sup_distance(samples, cdf) -> float:
    """Kolmogorov distance between the empirical law of ``samples`` and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def chain_positions(scenario: ScenarioConfig, mode, n=100_000, chains=1000, thin=25, warmup=2000, seed=0):
    """``(h, z, distance)`` samples gathered from warmed-up mobility chains."""
    mob = scenario.mobility
    rng = block_rng(seed, 0)
    fleet = initial_fleet((chains,), mob, mode, rng)
    run_steps(fleet, mob, mode, rng, warmup)
    per = -(-n // chains)
    h, z, w = [], [], []
    for _ in range(per):
        run_steps(fleet, mob, mode, rng, thin)
        h.append(fleet.h.copy())
        z.append(fleet.horizontal_range())
        w.append(fleet.distance())
    return (np.concatenate(a)[:n] for a in (h, z, w))


def distribution_check(n=100_000, tol=0.01, base=None, seed=0):
    base = base or ScenarioConfig()

    def body():
        mob = base.mobility
        rng = np.random.default_rng(seed)
        res = {}
        h, z, w3 = chain_positions(base, "fully3D", n, seed=seed)
        _, _, wf = chain_positions(base, "fixedHeight", n, seed=seed + 1)
        res["altitude"] = sup_distance(h, lambda x: altitude_cdf(x, mob))
        res["range"] = sup_distance(z, lambda x: range_cdf(x, mob))
        for mode, w in (("fully3D", w3), ("fixedHeight", wf)):
            d = DistanceDistribution(mode, mob)
            res[f"distance[{mode}]"] = sup_distance(w, lambda x, d=d: distance_cdf(x, d))
        for N in (1, 2):
            p = replace(base.sr, N=N)
            res[f"SR power N={N}"] = sup_distance(sample_sr_power(p, rng, n), lambda x, p=p: sr_sum_cdf_scaled(x, p, 1.0))
        for m in (1, 2):
            p = replace(base.terrestrial, m_ud=m)
            res[f"Nakagami power m={m}"] = sup_distance(
                sample_nakagami_power(p, rng, n), lambda x, p=p: special.gammainc(p.m_ud, p.m_ud * x / p.Omega_ud)
            )
        worst = max(res, key=res.get)
        ok = all(v < tol for v in res.values())
        return ok, f"max sup-distance {res[worst]:.4f} ({worst}, tol {tol:g})"

    return _timed("sampler vs density", body)


# 8 -------------------------------------------------------------------------


def asymptotic_check(snr_db=70.0, tol=0.1, base=None):
    base = base or ScenarioConfig()

    def body():
        worst, where = 0.0, ""
        for scheme in SCHEMES:
            for mode in MODES:
                r = outage(OutageQuery.at_snr_db(base, snr_db, scheme, mode))
                dev = abs(r.op_exact / r.op_asymptotic - 1)
                if dev >= worst:
                    worst, where = dev, f"{scheme}/{mode}"
        return worst < tol, f"max |exact/asymptotic - 1| {worst:.2e} at {where} (tol {tol:g})"

    return _timed("asymptotic consistency", body)


def run_all(quick: bool = False) -> list[CheckResult]:
    """Every check; ``quick`` uses 3 simulation seeds instead of 20."""
    seeds = range(3) if quick else range(20)
    return [
        psi_oracle_check(),
        sim_agreement_check(seeds=seeds),
        diversity_check(),
        scheme_ordering_check(),
        mode_ordering_check(),
        lambda_sensitivity_check(),
        distribution_check(),
        asymptotic_check(),
    ]
