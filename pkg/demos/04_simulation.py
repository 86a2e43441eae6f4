"""Checking the closed forms against a seeded Monte Carlo run."""
from hstn import OutageQuery, ScenarioConfig, SimPlan, estimate_curve, outage

sc = ScenarioConfig()
plan = SimPlan(trials=50_000, warmup_steps=2000, seed=7)

for mode in ("fully3D", "fixedHeight"):
    est = estimate_curve(plan, sc, mode, [30.0, 40.0, 50.0])
    for (scheme, snr), e in sorted(est.items()):
        exact = outage(OutageQuery.at_snr_db(sc, snr, scheme, mode)).op_exact
        z = (e.op_hat - exact) / max(e.stderr, 1e-300)
        print(f"{mode:11s} {scheme:3s} {snr:4.0f} dB  sim {e.op_hat:.4e} +- {e.stderr:.1e}  exact {exact:.4e}  z {z:+.2f}")
