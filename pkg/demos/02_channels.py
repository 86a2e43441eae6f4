"""The two hops: a shadowed-Rician satellite link and a Nakagami-m UAV link."""
import numpy as np

from hstn import LinkBudget, NakagamiParams, SrFadingParams, eta_s, linear_to_db
from hstn.channel import af_end_to_end_snr, sample_nakagami_power, sample_sr_power, sr_sum_cdf_scaled

budget = LinkBudget()
print("beam offset rho_u:", budget.rho_u)
print("satellite-to-UAV SNR scale (dB):", linear_to_db(eta_s(budget)))

# Heavy shadowing, two satellite antennas
sr = SrFadingParams()
print("series (gamma, coefficient):", sr.series)

rng = np.random.default_rng(1)
g = sample_sr_power(sr, rng, 100_000)
for x in (0.05, 0.2, 1.0):
    print(f"P(|g|^2 <= {x}) sim {np.mean(g <= x):.4f}  closed form {sr_sum_cdf_scaled(x, sr, 1.0):.4f}")

# Amplify-and-forward: the end-to-end SNR is always below the weaker hop
a = 1e3 * g[:5]
b = 1e3 * sample_nakagami_power(NakagamiParams(), rng, 5)
print(np.c_[a, b, af_end_to_end_snr(a, b)])
