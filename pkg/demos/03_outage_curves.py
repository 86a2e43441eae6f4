"""Outage probability of the three caching schemes, exact and asymptotic."""
import numpy as np

from hstn import OutageQuery, ScenarioConfig, diversity_order, outage

sc = ScenarioConfig()  # {M, N, m_ud} = {2, 2, 1}, Zipf exponent 2
snr = np.arange(0, 71, 10)

print("snr   " + "  ".join(f"{s:>12}" for s in ("NC", "MPC", "UC")))
for s in snr:
    row = [outage(OutageQuery.at_snr_db(sc, s, k, "fully3D")).op_exact for k in ("NC", "MPC", "UC")]
    print(f"{s:3d}  " + "  ".join(f"{v:12.4e}" for v in row))

# MPC wins everywhere; UC gives up selection diversity for content diversity
for k in ("NC", "MPC", "UC"):
    print(k, "diversity order ~", round(diversity_order(k, "fully3D", sc), 3))

# More terrestrial diversity lifts MPC to 4
print("MPC {2,2,2}:", round(diversity_order("MPC", "fully3D", sc.with_triplet(2, 2, 2)), 3))

# Exact vs asymptote at 70 dB
r = outage(OutageQuery.at_snr_db(sc, 70, "MPC", "fixedHeight"))
print("exact / asymptotic at 70 dB:", r.op_exact / r.op_asymptotic)
