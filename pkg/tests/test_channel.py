import math
from dataclasses import replace

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from hstn.channel import (
    BOLTZMANN,
    LinkBudget,
    NakagamiParams,
    SrFadingParams,
    UnsupportedParameterError,
    af_end_to_end_snr,
    beam_gain,
    beam_pattern,
    db_to_linear,
    eta_s,
    free_space_amplitude,
    lambda_ud,
    linear_to_db,
    sample_nakagami_power,
    sample_sr_power,
    sr_sum_cdf_scaled,
    sr_sum_cdf_small,
    sr_sum_pdf,
)
from hstn.validation import sup_distance

SR = SrFadingParams()

# mpmath (30 digits): integral of the single-antenna density
# alpha e^{-beta x} 1F1(m; 1; delta x) and of its self-convolution
SR_CDF_N1 = {0.05: 0.32649218152357808, 0.2: 0.79423620173914187, 1.0: 0.99963119004608528}
SR_CDF_N2 = {0.05: 0.060284367202103589, 0.2: 0.46891767708443777, 1.0: 0.99671554517872874}


def test_db_roundtrip():
    assert db_to_linear(30) == pytest.approx(1000.0)
    assert linear_to_db(db_to_linear(-7.25)) == pytest.approx(-7.25)


def test_beam_pattern_boresight_and_series():
    assert beam_pattern(0.0) == 1.0
    for rho in (1e-5, 5e-5):
        direct = float(mp.besselj(1, rho) / (2 * rho) + 36 * mp.besselj(3, rho) / rho**3)
        assert beam_pattern(rho) == pytest.approx(direct, rel=1e-12)
    assert beam_pattern(2.0) == pytest.approx(float(mp.besselj(1, 2) / 4 + 36 * mp.besselj(3, 2) / 8), rel=1e-13)


def test_link_budget_scale():
    b = LinkBudget()
    rho = 2.07123 * math.sin(math.radians(0.8)) / math.sin(math.radians(0.3))
    assert b.rho_u == pytest.approx(rho, rel=1e-14)
    gain = 10 ** 0.48 * beam_pattern(rho)
    assert beam_gain(b) == pytest.approx(gain, rel=1e-14)
    assert beam_gain(replace(b, square_beam=True)) == pytest.approx(10 ** 0.48 * beam_pattern(rho) ** 2, rel=1e-14)
    want = 10.0 * 10 ** 5.345 * gain / (BOLTZMANN * 300 * 15e6) * (3e8 / (4 * math.pi * 2e9 * 35786e3)) ** 2
    assert eta_s(b) == pytest.approx(want, rel=1e-13)
    assert free_space_amplitude(b) == pytest.approx(3e8 / (4 * math.pi * 2e9 * 35786e3))
    # frozen: the unsquared beam at 0.8 deg off a 0.3 deg beam puts eta_s near -5.66 dB
    assert linear_to_db(eta_s(b)) == pytest.approx(-5.664724865340489, abs=1e-9)


@pytest.mark.parametrize("kw", [dict(P_s=0), dict(theta_u=0), dict(theta_3dB=95)])
def test_link_budget_validation(kw):
    with pytest.raises(ValueError):
        LinkBudget(**kw)


def test_sr_parameters():
    two_b = 0.126
    assert SR.alpha_u == pytest.approx((two_b * 2 / (two_b * 2 + 0.0005)) ** 2 / two_b)
    assert SR.beta_u == pytest.approx(1 / two_b)
    assert SR.delta_u == pytest.approx(0.0005 / (two_b * (two_b * 2 + 0.0005)))
    # (m_su)^N index tuples with equal sum merge into N(m_su - 1) + 1 gammas
    assert [g for g, _ in SR.series] == [2, 3, 4]


def test_sr_rejects_fractional_m():
    with pytest.raises(UnsupportedParameterError, match="integer"):
        SrFadingParams(m_su=2.5)
    with pytest.raises(ValueError):
        SrFadingParams(N=0)


@pytest.mark.parametrize("N,table", [(1, SR_CDF_N1), (2, SR_CDF_N2)])
def test_sr_cdf_vs_hypergeometric_oracle(N, table):
    p = replace(SR, N=N)
    for x, want in table.items():
        assert sr_sum_cdf_scaled(x, p, 1.0) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_sr_pdf_normalised_and_cdf_consistent(N, m):
    p = SrFadingParams(m_su=m, N=N)
    assert integrate.quad(lambda x: sr_sum_pdf(x, p), 0, np.inf)[0] == pytest.approx(1.0, rel=1e-9)
    for x in (0.03, 0.3):
        assert sr_sum_cdf_scaled(x, p, 1.0) == pytest.approx(integrate.quad(lambda t: sr_sum_pdf(t, p), 0, x)[0], rel=1e-9)


def test_sr_cdf_scaling_and_small_argument():
    eta = 1e5
    assert sr_sum_cdf_scaled(0.2 * eta, SR, eta) == pytest.approx(sr_sum_cdf_scaled(0.2, SR, 1.0), rel=1e-12)
    x = 1e-6
    assert sr_sum_cdf_scaled(x, SR, 1.0) == pytest.approx(sr_sum_cdf_small(x, SR, 1.0), rel=1e-4)
    assert sr_sum_cdf_scaled(0.0, SR, 1.0) == 0.0
    assert sr_sum_cdf_scaled(np.inf, SR, 1.0) == 1.0


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-8, 50), st.floats(1e-8, 50), st.floats(1e-3, 1e6))
def test_sr_cdf_monotone(x, y, eta):
    a, b = sorted((x, y))
    assert 0 <= sr_sum_cdf_scaled(a, SR, eta) <= sr_sum_cdf_scaled(b, SR, eta) <= 1


@pytest.mark.parametrize("N", [1, 2])
def test_sr_sampler(N):
    p = replace(SR, N=N)
    x = sample_sr_power(p, np.random.default_rng(N), 100_000)
    assert sup_distance(x, lambda t: sr_sum_cdf_scaled(t, p, 1.0)) < 0.01
    # E||g||^2 = N (2b + Omega)
    assert x.mean() == pytest.approx(N * (2 * p.b_su + p.Omega_su), rel=0.02)


@pytest.mark.parametrize("m", [1, 2])
def test_nakagami_sampler(m):
    p = NakagamiParams(m_ud=m)
    x = sample_nakagami_power(p, np.random.default_rng(m), 100_000)
    assert sup_distance(x, lambda t: special.gammainc(m, m * t / p.Omega_ud)) < 0.01


def test_nakagami_validation():
    with pytest.raises(UnsupportedParameterError):
        NakagamiParams(m_ud=1.5)
    with pytest.raises(ValueError):
        NakagamiParams(alpha=1.5)


def test_af_snr():
    assert af_end_to_end_snr(3.0, 5.0) == pytest.approx(15 / 9)
    np.testing.assert_allclose(af_end_to_end_snr([1.0, 0.0], [1.0, 4.0]), [1 / 3, 0.0])


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_af_snr_below_both_hops(a, b):
    v = af_end_to_end_snr(a, b)
    assert 0 <= v <= min(a, b)


def test_lambda_ud():
    assert lambda_ud(100.0, 10.0, 2.0, 0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        lambda_ud(1.0, 0.0, 2.0, 1.0)
