import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hstn.analysis import outage
from hstn.caching import hit_mass
from hstn.mobility import FULLY_3D, initial_fleet
from hstn.scenario import OutageQuery, ScenarioConfig
from hstn.simulator import (
    BLOCK_CHAINS,
    SimEstimate,
    SimPlan,
    TrialSamples,
    block_rng,
    draw_samples,
    env_workers,
    estimate_curve,
    estimate_op,
    outage_indicators,
    run_trial,
)

SC = ScenarioConfig()
SMALL = SimPlan(trials=4000, warmup_steps=300, chains=400, thin=5)


def test_plan_validation_and_layout():
    for kw in (dict(trials=0), dict(warmup_steps=-1), dict(workers=0), dict(thin=0), dict(seed=-1), dict(seed=2**64)):
        with pytest.raises(ValueError):
            SimPlan(**kw)
    p = SimPlan(trials=100_000, chains=1000)
    assert (p.trials_per_chain, p.n_chains) == (100, 1000)
    p = SimPlan(trials=10, chains=1000)
    assert (p.trials_per_chain, p.n_chains) == (1, 10)
    p = SimPlan(trials=50, rewarm_every_trial=True)
    assert (p.trials_per_chain, p.n_chains) == (1, 50)


def test_estimate_from_indicators():
    e = SimEstimate.from_indicators([True, False, False, True])
    assert (e.op_hat, e.n_events, e.trials) == (0.5, 2, 4)
    assert e.stderr == pytest.approx(math.sqrt(0.25 / 4))


@given(st.lists(st.booleans(), min_size=1, max_size=200))
def test_estimate_invariants(xs):
    e = SimEstimate.from_indicators(xs)
    assert 0 <= e.op_hat <= 1
    assert e.stderr == pytest.approx(math.sqrt(e.op_hat * (1 - e.op_hat) / e.trials))


def test_outage_indicators_by_hand():
    # two trials, two relays, eta_s = eta_u = 1, alpha = 2, gamma_th1 = 3, gamma_th2 = 1
    s = TrialSamples(
        distance=np.array([[1.0, 2.0], [1.0, 1.0]]),
        g_su=np.array([[100.0, 100.0], [0.1, 0.1]]),
        g_ud=np.array([[8.0, 40.0], [0.5, 2.0]]),
        requested=np.array([1, 3]),
    )
    # lam_ud = [[8, 10], [0.5, 2]]; lam_id row 0 = [800/109, 1000/111]
    out, relay = outage_indicators(s, SC, 1.0, 1.0, "NC")
    np.testing.assert_array_equal(out, [False, True])
    np.testing.assert_array_equal(relay, [1, 1])
    out, relay = outage_indicators(s, SC, 1.0, 1.0, "MPC")  # file 1 cached, file 3 not
    np.testing.assert_array_equal(out, [False, True])
    np.testing.assert_array_equal(relay, [1, 1])
    out, relay = outage_indicators(s, SC, 1.0, 1.0, "UC")  # file 1 at relay 0, file 3 at relay 1
    np.testing.assert_array_equal(out, [False, False])
    np.testing.assert_array_equal(relay, [0, 1])
    with pytest.raises(ValueError):
        outage_indicators(s, SC, 1.0, 1.0, "LRU")


def test_same_seed_same_samples():
    a = draw_samples(SMALL, SC, "fully3D")
    b = draw_samples(SMALL, SC, "fully3D")
    for k in ("distance", "g_su", "g_ud", "requested"):
        np.testing.assert_array_equal(getattr(a, k), getattr(b, k))
    c = draw_samples(replace(SMALL, seed=1), SC, "fully3D")
    assert not np.array_equal(a.g_su, c.g_su)
    assert a.distance.shape == (SMALL.trials, SC.M)


def test_worker_count_does_not_change_results():
    plan = SimPlan(trials=2 * BLOCK_CHAINS + 500, warmup_steps=50, chains=2 * BLOCK_CHAINS + 500, thin=2)
    a = draw_samples(plan, SC, "fixedHeight")
    b = draw_samples(replace(plan, workers=3), SC, "fixedHeight")
    np.testing.assert_array_equal(a.distance, b.distance)
    np.testing.assert_array_equal(a.requested, b.requested)


def test_block_streams_independent():
    x = block_rng(5, 0).random(4)
    y = block_rng(5, 1).random(4)
    assert not np.array_equal(x, y)
    np.testing.assert_array_equal(x, block_rng(5, 0).random(4))


def test_hit_frequency_matches_hit_mass():
    s = draw_samples(SimPlan(trials=50_000, warmup_steps=10, chains=1000, thin=1), SC, "fixedHeight")
    for scheme in ("MPC", "UC"):
        p = hit_mass(replace(SC.cache, scheme=scheme)).hit
        limit = SC.cache.C if scheme == "MPC" else SC.cache.M * SC.cache.C
        f = np.mean(s.requested <= limit)
        assert abs(f - p) < 3 * math.sqrt(p * (1 - p) / s.trials)


@pytest.mark.parametrize("mode", ["fully3D", "fixedHeight"])
def test_agrees_with_analysis(mode):
    plan = SimPlan(trials=40_000, warmup_steps=2000, chains=1000, thin=25, seed=42)
    res = estimate_curve(plan, SC, mode, [40.0, 50.0, 60.0])
    for (scheme, snr), est in res.items():
        pe = outage(OutageQuery.at_snr_db(SC, snr, scheme, mode)).op_exact
        if min(est.trials * pe, est.trials * (1 - pe)) < 50:
            continue
        assert abs(est.op_hat - pe) < 4 * math.sqrt(pe * (1 - pe) / est.trials), (scheme, snr)


def test_rewarm_protocol_runs():
    plan = SimPlan(trials=300, warmup_steps=100, rewarm_every_trial=True)
    q = OutageQuery.at_snr_db(SC, 50.0, "MPC", "fully3D")
    e = estimate_op(plan, q)
    assert e.trials == 300 and 0 <= e.op_hat <= 1


def test_estimate_op_reuses_samples():
    q = OutageQuery.at_snr_db(SC, 45.0, "UC", "fixedHeight")
    s = draw_samples(SMALL, SC, "fixedHeight")
    assert estimate_op(SMALL, q, s) == estimate_op(SMALL, q)


def test_run_trial_outcome():
    rng = np.random.default_rng(0)
    fleet = initial_fleet(SC.M, SC.mobility, FULLY_3D, rng)
    h0 = fleet.h.copy()
    o = run_trial("UC", FULLY_3D, SC, fleet, rng, 1e5, 1e5)
    assert 1 <= o.requested_file <= SC.cache.K
    assert o.hit == (o.requested_file <= 4)
    assert set(o.outage) == {"NC", "MPC", "UC"}
    assert 0 <= o.selected_relay < SC.M
    assert fleet.h.shape == h0.shape  # advanced in place


def test_env_workers(monkeypatch):
    monkeypatch.delenv("HSTN_WORKERS", raising=False)
    assert env_workers(3) == 3
    monkeypatch.setenv("HSTN_WORKERS", "8")
    assert env_workers() == 8
    monkeypatch.setenv("HSTN_WORKERS", "0")
    with pytest.raises(ValueError):
        env_workers()
