import math
import warnings
from dataclasses import replace

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hstn.analysis import (
    cdf_lambda_ud,
    cdf_lambda_ud_asymptotic,
    distance_moment,
    diversity_order,
    op_mpc,
    op_nc,
    op_uc,
    outage,
    outage_curve,
    pdf_lambda_ud,
    psi,
    psi_asymptotic,
    psi_oracle,
)
from hstn.caching import hit_mass
from hstn.channel import af_end_to_end_snr, sample_nakagami_power, sample_sr_power
from hstn.mobility import MODES, DistanceDistribution, distance_pdf, sample_steady_distance
from hstn.scenario import OutageQuery, ScenarioConfig
from hstn.specfun import AccuracyError

SC = ScenarioConfig()

# closed-form values for the default scenario ({M,N,m_ud} = {2,2,1}, lambda = 2)
FROZEN_PSI = {
    ("fully3D", 50.0): 0.18602149466938422,
    ("fully3D", 70.0): 0.002105281316607477,
    ("fixedHeight", 50.0): 0.2870605320898033,
    ("fixedHeight", 70.0): 0.0034137955196795744,
}
FROZEN_OP = {
    ("NC", "fully3D", 50.0): 0.03460399647903174,
    ("MPC", "fully3D", 50.0): 0.011054923556517163,
    ("UC", "fully3D", 50.0): 0.06379307778513398,
    ("NC", "fixedHeight", 70.0): 1.1653999850184336e-05,
    ("MPC", "fixedHeight", 70.0): 3.5439465043765966e-06,
    ("UC", "fixedHeight", 70.0): 0.0010174044758677555,
}


def q(snr, scheme="NC", mode="fully3D", sc=SC):
    return OutageQuery.at_snr_db(sc, snr, scheme, mode)


def _mp_cdf_ud(x, mode, eta):
    # independent route: mpmath quadrature of the Nakagami-1 CDF over the distance law
    d = DistanceDistribution(mode, SC.mobility)
    lo, hi = d.support
    pts = [lo] + [p for p in d.breakpoints if lo < p < hi] + [hi]
    f = lambda w: distance_pdf(float(w), d) * (1 - mp.exp(-x * w**2 / eta))
    return float(mp.quad(f, pts))


@pytest.mark.parametrize("mode", MODES)
@pytest.mark.parametrize("snr", [30.0, 50.0, 70.0])
def test_cdf_lambda_ud_vs_mpmath(mode, snr):
    eta = 10 ** (snr / 10)
    assert cdf_lambda_ud(1.0, mode, SC, eta) == pytest.approx(_mp_cdf_ud(1.0, mode, eta), rel=1e-9)


@pytest.mark.parametrize("mode", MODES)
def test_pdf_lambda_ud_is_derivative(mode):
    eta, x, h = 1e5, 2.0, 1e-4
    num = (cdf_lambda_ud(x + h, mode, SC, eta) - cdf_lambda_ud(x - h, mode, SC, eta)) / (2 * h)
    assert pdf_lambda_ud(x, mode, SC, eta) == pytest.approx(num, rel=1e-6)


def test_cdf_lambda_ud_asymptote_and_moment():
    for mode in MODES:
        eta = 1e8
        assert cdf_lambda_ud(1.0, mode, SC, eta) / cdf_lambda_ud_asymptotic(1.0, mode, SC, eta) == pytest.approx(1, rel=1e-4)
    # E[W^2] for fixed height: H^2 + R^2/2
    assert distance_moment("fixedHeight", SC, 2.0) == pytest.approx(80**2 + 100**2 / 2, rel=1e-10)


@pytest.mark.parametrize("key,want", sorted(FROZEN_PSI.items()))
def test_psi_frozen(key, want):
    mode, snr = key
    qq = q(snr, mode=mode)
    assert psi(SC.gamma_th1, mode, SC, qq.eta_s, qq.eta_u) == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("N,m_su,m_ud", [(1, 2, 1), (2, 2, 1), (2, 2, 2), (1, 1, 2), (3, 2, 1)])
@pytest.mark.parametrize("mode", MODES)
@pytest.mark.parametrize("snr", [40.0, 55.0, 70.0])
def test_psi_closed_form_vs_oracle(N, m_su, m_ud, mode, snr):
    sc = replace(SC, sr=replace(SC.sr, N=N, m_su=m_su), terrestrial=replace(SC.terrestrial, m_ud=m_ud))
    qq = q(snr, mode=mode, sc=sc)
    a = psi(sc.gamma_th1, mode, sc, qq.eta_s, qq.eta_u)
    b = psi_oracle(sc.gamma_th1, mode, sc, qq.eta_s, qq.eta_u)
    assert a == pytest.approx(b, rel=1e-8)


def test_psi_decoupled_hops():
    # first hop much stronger than the second: outage is set by the terrestrial hop
    a = psi(SC.gamma_th1, "fully3D", SC, 1e12, 1e5)
    b = psi_oracle(SC.gamma_th1, "fully3D", SC, 1e12, 1e5)
    assert a == pytest.approx(b, rel=1e-6)
    assert a == pytest.approx(cdf_lambda_ud(SC.gamma_th1, "fully3D", SC, 1e5), rel=1e-4)


def test_psi_monte_carlo():
    rng = np.random.default_rng(11)
    n = 400_000
    eta = 1e5
    for mode in MODES:
        w = sample_steady_distance(DistanceDistribution(mode, SC.mobility), rng, n)
        lam = af_end_to_end_snr(eta * sample_sr_power(SC.sr, rng, n), eta * w**-2.0 * sample_nakagami_power(SC.terrestrial, rng, n))
        p = np.mean(lam < SC.gamma_th1)
        se = math.sqrt(p * (1 - p) / n)
        assert abs(p - psi(SC.gamma_th1, mode, SC, eta, eta)) < 4 * se


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 70), st.floats(0.5, 10))
def test_psi_decreasing_and_bounded(snr, gap):
    a = psi(SC.gamma_th1, "fully3D", SC, *(2 * [10 ** (snr / 10)]))
    b = psi(SC.gamma_th1, "fully3D", SC, *(2 * [10 ** ((snr + gap) / 10)]))
    assert 0 <= b <= a * (1 + 1e-9) <= 1 + 1e-9
    # end-to-end SNR never exceeds the second hop
    assert a >= cdf_lambda_ud(SC.gamma_th1, "fully3D", SC, 10 ** (snr / 10)) * (1 - 1e-9)


@pytest.mark.parametrize("key,want", sorted(FROZEN_OP.items()))
def test_outage_frozen(key, want):
    scheme, mode, snr = key
    assert outage(q(snr, scheme, mode)).op_exact == pytest.approx(want, rel=1e-9)


def test_scheme_composition():
    qq = q(50.0, "MPC")
    nc = op_nc(qq)
    F2 = cdf_lambda_ud(SC.gamma_th2, "fully3D", SC, qq.eta_u)
    mpc = hit_mass(replace(SC.cache, scheme="MPC"))
    assert op_mpc(qq).op_exact == pytest.approx(mpc.hit * F2**2 + mpc.miss * nc.op_exact, rel=1e-14)
    uc = hit_mass(replace(SC.cache, scheme="UC"))
    assert op_uc(q(50.0, "UC")).op_exact == pytest.approx(uc.hit * F2 + uc.miss * nc.op_exact, rel=1e-14)
    assert nc.op_exact == pytest.approx(nc.terms["psi"] ** 2, rel=1e-15)


@pytest.mark.parametrize("scheme", ["NC", "MPC", "UC"])
@pytest.mark.parametrize("mode", MODES)
def test_asymptote_converges(scheme, mode):
    r = outage(q(70.0, scheme, mode))
    assert r.op_exact / r.op_asymptotic == pytest.approx(1.0, abs=0.01)
    assert 0.0 <= r.op_asymptotic_clamped <= 1.0


def test_psi_asymptotic_is_sum_of_hops():
    from hstn.channel import sr_sum_cdf_small

    qq = q(60.0)
    want = sr_sum_cdf_small(SC.gamma_th1, SC.sr, qq.eta_s) + cdf_lambda_ud_asymptotic(SC.gamma_th1, "fully3D", SC, qq.eta_u)
    assert psi_asymptotic(SC.gamma_th1, "fully3D", SC, qq.eta_s, qq.eta_u) == pytest.approx(want, rel=1e-14)


@pytest.mark.parametrize(
    "scheme,triplet,want",
    [("NC", (2, 2, 1), 2.0), ("MPC", (2, 2, 1), 2.0), ("UC", (2, 2, 1), 1.0), ("MPC", (2, 2, 2), 4.0), ("NC", (1, 2, 1), 1.0)],
)
def test_diversity_orders(scheme, triplet, want):
    sc = SC.with_triplet(*triplet)
    assert diversity_order(scheme, "fully3D", sc) == pytest.approx(want, abs=0.05)


def test_diversity_single_antenna_needs_higher_snr():
    # with N=1 the satellite term ~24/eta only overtakes the path-loss-weighted
    # terrestrial term ~1e9/eta^2 near 86 dB, so [50, 70] dB is pre-asymptotic
    sc = SC.with_triplet(3, 1, 2)
    assert diversity_order("NC", "fully3D", sc) > 4.0
    assert diversity_order("NC", "fully3D", sc, fit_window_db=(110.0, 130.0)) == pytest.approx(3.0, abs=0.05)


def test_diversity_order_window_shift():
    with pytest.warns(UserWarning, match="underflows"):
        d = diversity_order("MPC", "fully3D", SC.with_triplet(4, 4, 4), fit_window_db=(240.0, 260.0), n_points=5)
    assert d == pytest.approx(16.0, abs=1e-6)
    with pytest.warns(UserWarning), pytest.raises(AccuracyError):
        diversity_order("MPC", "fully3D", SC.with_triplet(4, 4, 4), fit_window_db=(3000.0, 3020.0), n_points=5)
    with pytest.raises(ValueError):
        diversity_order("NC", "fully3D", SC, n_points=3)


def test_outage_curve_shape():
    res = outage_curve(SC, [10.0, 40.0, 70.0], "MPC", "fixedHeight")
    ops = [r.op_exact for r in res]
    assert len(ops) == 3 and ops[0] > ops[1] > ops[2] > 0


def test_query_validation():
    with pytest.raises(ValueError):
        OutageQuery(SC, 1.0, 1.0, "XX")
    with pytest.raises(ValueError):
        OutageQuery(SC, 0.0, 1.0)
    assert q(30.0).snr_db == pytest.approx(30.0)
    assert (SC.gamma_th1, SC.gamma_th2) == (3.0, 1.0)
