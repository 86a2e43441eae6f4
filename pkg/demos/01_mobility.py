"""Where are the UAVs?  The mixed mobility model and its steady-state laws."""
import numpy as np

from hstn import MobilityParams
from hstn.mobility import (
    DistanceDistribution,
    altitude_cdf,
    distance_cdf,
    initial_fleet,
    mean_movement_time,
    run_steps,
)

params = MobilityParams()  # H = 80 m, R = 100 m, p_s = 0.5
print("mean vertical leg (s):", mean_movement_time(params))
print("auto-derived dwell range (s):", params.dwell_range)

# Run 2000 UAVs for a while and look at them
rng = np.random.default_rng(0)
fleet = initial_fleet(2000, params, "fully3D", rng)
run_steps(fleet, params, "fully3D", rng, 3000)

print("fraction dwelling:", 1 - fleet.moving.mean())  # ~ p_s

# Empirical vs analytic altitude CDF at a few heights
for h in (20, 40, 60):
    print(f"P(h <= {h}) sim {np.mean(fleet.h <= h):.3f}  model {altitude_cdf(h, params):.3f}")

# Distance to the user: fully 3D motion vs a fleet pinned at H
for mode in ("fully3D", "fixedHeight"):
    d = DistanceDistribution(mode, params)
    print(mode, "P(W <= 90 m) =", round(distance_cdf(90.0, d), 4))
