"""Command-line sweeps: ``hstn --config run.toml --out op.csv``.

Exit codes: 0 success, 2 accuracy error (quadrature tolerance missed or a
``--check`` criterion failed), 3 invalid configuration or unwritable output.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import validation
from .analysis import diversity_order, outage
from .caching import hit_mass
from .channel import eta_s as link_budget_eta_s
from .channel import linear_to_db
from .config import ConfigError, ExperimentSpec, Sweep, load_config, validate
from .scenario import OutageQuery
from .simulator import SimEstimate, draw_samples, env_workers, outage_indicators
from .specfun import AccuracyError

COLUMNS = (
    "snr_db",
    "scheme",
    "mode",
    "op_exact",
    "op_asymptotic",
    "op_sim",
    "sim_stderr",
    "n_trials",
    "hit_mass",
    "gamma_th1",
    "gamma_th2",
)

EXIT_OK, EXIT_ACCURACY, EXIT_INVALID = 0, 2, 3


def fmt(x) -> str:
    """17 significant digits, enough to round-trip any double."""
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _scheme_hit_mass(spec: ExperimentSpec, scheme: str) -> float:
    if scheme == "NC":
        return 0.0
    hm = hit_mass(replace(spec.scenario.cache, scheme=scheme))
    return hm.hit if scheme == "MPC" else float(sum(hm.per_relay))


def _eta_s_db(spec: ExperimentSpec):
    if spec.sweep.eta_s_mode == "link_budget":
        return float(linear_to_db(link_budget_eta_s(spec.scenario.budget)))
    return None


def compute_rows(spec: ExperimentSpec, workers: int | None = None) -> list[dict]:
    """One dict per (scheme, mode, snr), in that sort order."""
    sc, out = spec.scenario, spec.outputs
    snrs = spec.sweep.points()
    es_db = _eta_s_db(spec)
    plan = replace(spec.sim, workers=workers or spec.sim.workers)

    sim: dict = {}
    if out.simulated:
        for mode in spec.modes:
            samples = draw_samples(plan, sc, mode)
            for s in snrs:
                q = OutageQuery.at_snr_db(sc, s, "NC", mode, es_db)
                for scheme in spec.schemes:
                    ind, _ = outage_indicators(samples, sc, q.eta_s, q.eta_u, scheme)
                    sim[scheme, mode, s] = SimEstimate.from_indicators(ind)

    rows = []
    for scheme in spec.schemes:
        hm = _scheme_hit_mass(spec, scheme)
        for mode in spec.modes:
            for s in snrs:
                r = {"snr_db": s, "scheme": scheme, "mode": mode, "hit_mass": hm, "gamma_th1": sc.gamma_th1, "gamma_th2": sc.gamma_th2}
                if out.exact or out.asymptotic:
                    res = outage(OutageQuery.at_snr_db(sc, s, scheme, mode, es_db))
                    r["op_exact"] = res.op_exact if out.exact else None
                    r["op_asymptotic"] = res.op_asymptotic if out.asymptotic else None
                if out.simulated:
                    est = sim[scheme, mode, s]
                    r.update(op_sim=est.op_hat, sim_stderr=est.stderr, n_trials=est.trials)
                rows.append(r)
    return rows


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([r.get(c) if c in ("scheme", "mode") else fmt(r.get(c)) for c in COLUMNS])
    return buf.getvalue()


def summarize(spec: ExperimentSpec, rows: list[dict]) -> list[str]:
    """Diversity-order fits and ordering verdicts, one line each."""
    lines = ["# summary"]
    key = "op_exact" if spec.outputs.exact else ("op_sim" if spec.outputs.simulated else "op_asymptotic")
    if spec.sweep.eta_s_mode == "coupled" and (spec.outputs.exact or spec.outputs.asymptotic):
        for scheme in spec.schemes:
            for mode in spec.modes:
                d = diversity_order(scheme, mode, spec.scenario)
                lines.append(f"diversity {scheme:>3} {mode:<11}: {d:.3f}")
    by_key = {(r["scheme"], r["mode"], r["snr_db"]): r for r in rows}
    snrs = spec.sweep.points()

    def verdict(label, pairs):
        # sim estimates are noisy, so they are compared within 3 stderr
        bad = 0
        for a, b in pairs:
            ra, rb = by_key.get(a), by_key.get(b)
            if ra is None or rb is None or ra.get(key) is None or rb.get(key) is None:
                continue
            slack = 3 * math.hypot(ra["sim_stderr"], rb["sim_stderr"]) if key == "op_sim" else 0.0
            bad += ra[key] > rb[key] * (1 + 1e-12) + slack
        lines.append(f"ordering {label} ({key}): {'ok' if not bad else f'VIOLATED at {bad} point(s)'}")

    if "MPC" in spec.schemes:
        for other in ("NC", "UC"):
            if other in spec.schemes:
                verdict(f"MPC <= {other}", [(("MPC", m, s), (other, m, s)) for m in spec.modes for s in snrs])
    if {"fully3D", "fixedHeight"} <= set(spec.modes):
        verdict("fully3D <= fixedHeight", [((k, "fully3D", s), (k, "fixedHeight", s)) for k in spec.schemes for s in snrs])
    return lines


def run(spec: ExperimentSpec, err=None, workers: int | None = None) -> int:
    err = err or sys.stderr
    try:
        validate(spec)
        rows = compute_rows(spec, workers)
        text = render_csv(rows)
        summary = summarize(spec, rows)
    except ConfigError as exc:
        print(f"hstn: invalid configuration: {exc}", file=err)
        return EXIT_INVALID
    except AccuracyError as exc:
        print(f"hstn: accuracy error: {exc}", file=err)
        return EXIT_ACCURACY
    try:
        Path(spec.output_path).write_text(text)
    except OSError as exc:
        print(f"hstn: cannot write {spec.output_path}: {exc.strerror}", file=err)
        return EXIT_INVALID
    print("\n".join(summary), file=err)
    print(f"wrote {len(rows)} rows to {spec.output_path}", file=err)
    return EXIT_OK


def parse_snr(text: str) -> Sweep:
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI:STEP, got {text!r}") from None
    return Sweep(lo, hi, step)


def _list(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hstn", description="Outage probability of cache-enabled mobile UAV relays behind a satellite link.")
    p.add_argument("--config", metavar="PATH", help="TOML config (defaults for anything missing)")
    p.add_argument("--out", metavar="PATH", help="CSV output path")
    p.add_argument("--seed", type=int, metavar="U64")
    p.add_argument("--trials", type=int, metavar="N")
    p.add_argument("--schemes", type=_list, metavar="LIST", help="comma separated subset of NC,MPC,UC")
    p.add_argument("--modes", type=_list, metavar="LIST", help="comma separated subset of fully3D,fixedHeight")
    p.add_argument("--snr", type=parse_snr, metavar="LO:HI:STEP", help="SNR sweep in dB, inclusive")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--analytic-only", action="store_true", help="skip the simulation")
    g.add_argument("--sim-only", action="store_true", help="skip the closed forms")
    p.add_argument("--asymptotic", action="store_true", help="also emit the high-SNR asymptote")
    p.add_argument("--check", action="store_true", help="run the cross-validation suite instead of a sweep")
    p.add_argument("--quick", action="store_true", help="with --check: 3 simulation seeds instead of 20")
    return p


def apply_overrides(spec: ExperimentSpec, args) -> ExperimentSpec:
    sim = spec.sim
    if args.seed is not None:
        sim = replace(sim, seed=args.seed)
    if args.trials is not None:
        sim = replace(sim, trials=args.trials)
    sim = replace(sim, workers=env_workers(sim.workers))
    out = spec.outputs
    if args.analytic_only:
        out = replace(out, simulated=False)
    if args.sim_only:
        out = replace(out, exact=False, asymptotic=False, simulated=True)
    if args.asymptotic:
        out = replace(out, asymptotic=True)
    spec = replace(spec, sim=sim, outputs=out)
    if args.out:
        spec = replace(spec, output_path=args.out)
    if args.schemes:
        spec = replace(spec, schemes=args.schemes)
    if args.modes:
        spec = replace(spec, modes=args.modes)
    if args.snr:
        spec = replace(spec, sweep=replace(spec.sweep, snr_db_start=args.snr.snr_db_start, snr_db_stop=args.snr.snr_db_stop, snr_db_step=args.snr.snr_db_step))
    return validate(spec)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.check:
        results = validation.run_all(quick=args.quick)
        for r in results:
            print(r.line())
        return EXIT_OK if all(r.passed for r in results) else EXIT_ACCURACY
    try:
        spec = load_config(args.config) if args.config else ExperimentSpec()
        spec = apply_overrides(spec, args)
    except (ConfigError, ValueError) as exc:
        print(f"hstn: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
