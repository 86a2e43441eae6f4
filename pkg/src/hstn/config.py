"""Experiment configuration: a flat TOML file with six sections.

Every key is optional; an empty file yields the reference scenario
(GEO satellite link, heavy shadowing, H=80 m, R=100 m, rate 1 bit/s/Hz).
Unknown sections or keys are rejected so that typos never pass silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .caching import SCHEMES, CacheLayout
from .channel import LinkBudget, NakagamiParams, SrFadingParams
from .mobility import MODES, MobilityParams
from .scenario import ScenarioConfig
from .simulator import SimPlan


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""


@dataclass(frozen=True)
class Sweep:
    snr_db_start: float = 0.0
    snr_db_stop: float = 70.0
    snr_db_step: float = 2.0
    eta_s_mode: str = "coupled"  # or "link_budget": first-hop SNR fixed by the budget

    def points(self) -> list[float]:
        n = int(math.floor((self.snr_db_stop - self.snr_db_start) / self.snr_db_step + 1e-9)) + 1
        return [round(self.snr_db_start + i * self.snr_db_step, 10) for i in range(n)]


@dataclass(frozen=True)
class Outputs:
    exact: bool = True
    asymptotic: bool = False
    simulated: bool = True


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    sweep: Sweep = field(default_factory=Sweep)
    outputs: Outputs = field(default_factory=Outputs)
    schemes: tuple[str, ...] = SCHEMES
    modes: tuple[str, ...] = MODES
    sim: SimPlan = field(default_factory=SimPlan)
    output_path: str = "outage.csv"


# section -> key -> (target, attribute, type)
_SCHEMA: dict[str, dict[str, tuple[str, str, type]]] = {
    "satellite": {
        "P_s": ("budget", "P_s", float),
        "T": ("budget", "T", float),
        "W": ("budget", "W", float),
        "f_c": ("budget", "f_c", float),
        "d_u": ("budget", "d_u", float),
        "theta_u": ("budget", "theta_u", float),
        "theta_3dB": ("budget", "theta_3dB", float),
        "G_s_db": ("budget", "G_s_db", float),
        "G_u_db": ("budget", "G_u_db", float),
        "square_beam": ("budget", "square_beam", bool),
        "N": ("sr", "N", int),
        "m_su": ("sr", "m_su", int),
        "b_su": ("sr", "b_su", float),
        "Omega_su": ("sr", "Omega_su", float),
    },
    "fleet": {
        "M": ("cache", "M", int),
        "H": ("mobility", "H", float),
        "R": ("mobility", "R", float),
        "R_prime": ("mobility", "R_prime", float),
        "v_min": ("mobility", "v_min", float),
        "v_max": ("mobility", "v_max", float),
        "tau_min": ("mobility", "tau_min", float),
        "tau_max": ("mobility", "tau_max", float),
        "p_s": ("mobility", "p_s", float),
        "slot_duration": ("mobility", "slot_duration", float),
        "boundary": ("mobility", "boundary", str),
    },
    "terrestrial": {
        "m_ud": ("terrestrial", "m_ud", int),
        "Omega_ud": ("terrestrial", "Omega_ud", float),
        "alpha": ("terrestrial", "alpha", float),
    },
    "cache": {
        "K": ("cache", "K", int),
        "C": ("cache", "C", int),
        "lambda": ("cache", "lam", float),
    },
    "sweep": {
        "snr_db_start": ("sweep", "snr_db_start", float),
        "snr_db_stop": ("sweep", "snr_db_stop", float),
        "snr_db_step": ("sweep", "snr_db_step", float),
        "eta_s_mode": ("sweep", "eta_s_mode", str),
        "rate": ("scenario", "rate", float),
        "schemes": ("spec", "schemes", list),
        "modes": ("spec", "modes", list),
        "exact": ("outputs", "exact", bool),
        "asymptotic": ("outputs", "asymptotic", bool),
        "simulated": ("outputs", "simulated", bool),
        "output_path": ("spec", "output_path", str),
    },
    "sim": {
        "trials": ("sim", "trials", int),
        "warmup_steps": ("sim", "warmup_steps", int),
        "rewarm_every_trial": ("sim", "rewarm_every_trial", bool),
        "seed": ("sim", "seed", int),
        "workers": ("sim", "workers", int),
        "chains": ("sim", "chains", int),
        "thin": ("sim", "thin", int),
    },
}

_HINTS = {
    "m_su": "must be an integer: the shadowed-Rician series terminates at m_su-1",
    "m_ud": "must be an integer fading severity",
}


def _coerce(path: str, key: str, value: Any, typ: type):
    if typ is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"{path}: {_HINTS.get(key, 'must be an integer')}, got {value!r}")
        return int(value)
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if typ is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if typ is list:
        if isinstance(value, str):
            value = [v.strip() for v in value.split(",") if v.strip()]
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise ConfigError(f"{path}: expected a list of strings, got {value!r}")
        return tuple(value)
    raise AssertionError(typ)


def spec_from_dict(data: dict) -> ExperimentSpec:
    updates: dict[str, dict[str, Any]] = {}
    where: dict[tuple[str, str], str] = {}
    for section, body in data.items():
        if section not in _SCHEMA:
            raise ConfigError(f"{section}: unknown section (expected one of {sorted(_SCHEMA)})")
        if not isinstance(body, dict):
            raise ConfigError(f"{section}: expected a table")
        for key, value in body.items():
            path = f"{section}.{key}"
            if key not in _SCHEMA[section]:
                raise ConfigError(f"{path}: unknown key")
            target, attr, typ = _SCHEMA[section][key]
            updates.setdefault(target, {})[attr] = _coerce(path, key, value, typ)
            where[target, attr] = path
    return _build(updates, where)


def _make(cls, base, target, updates, where):
    kw = updates.get(target, {})
    try:
        return replace(base, **kw) if kw else base
    except (ValueError, TypeError) as exc:
        keys = ", ".join(where[target, k] for k in kw)
        raise ConfigError(f"{keys}: {exc}") from None


def _build(updates, where) -> ExperimentSpec:
    base = ExperimentSpec()
    sc = base.scenario
    mobility = _make(MobilityParams, sc.mobility, "mobility", updates, where)
    sr = _make(SrFadingParams, sc.sr, "sr", updates, where)
    terrestrial = _make(NakagamiParams, sc.terrestrial, "terrestrial", updates, where)
    cache = _make(CacheLayout, sc.cache, "cache", updates, where)
    budget = _make(LinkBudget, sc.budget, "budget", updates, where)
    try:
        scenario = replace(sc, mobility=mobility, sr=sr, terrestrial=terrestrial, cache=cache, budget=budget, **updates.get("scenario", {}))
    except ValueError as exc:
        raise ConfigError(f"sweep.rate: {exc}") from None
    sweep = _make(Sweep, base.sweep, "sweep", updates, where)
    outputs = _make(Outputs, base.outputs, "outputs", updates, where)
    sim = _make(SimPlan, base.sim, "sim", updates, where)
    extra = updates.get("spec", {})
    spec = replace(base, scenario=scenario, sweep=sweep, outputs=outputs, sim=sim, **extra)
    validate(spec)
    return spec


def validate(spec: ExperimentSpec) -> ExperimentSpec:
    sw = spec.sweep
    if not sw.snr_db_step > 0:
        raise ConfigError("sweep.snr_db_step: must be positive")
    if sw.snr_db_stop < sw.snr_db_start:
        raise ConfigError("sweep.snr_db_stop: must be >= snr_db_start")
    if sw.eta_s_mode not in ("coupled", "link_budget"):
        raise ConfigError("sweep.eta_s_mode: expected 'coupled' or 'link_budget'")
    if not spec.schemes or any(s not in SCHEMES for s in spec.schemes):
        raise ConfigError(f"sweep.schemes: expected a non-empty subset of {SCHEMES}, got {spec.schemes}")
    if not spec.modes or any(m not in MODES for m in spec.modes):
        raise ConfigError(f"sweep.modes: expected a non-empty subset of {MODES}, got {spec.modes}")
    o = spec.outputs
    if not (o.exact or o.asymptotic or o.simulated):
        raise ConfigError("sweep.exact: at least one of exact/asymptotic/simulated must be on")
    c = spec.scenario.cache
    if "UC" in spec.schemes and c.M * c.C > c.K:
        raise ConfigError(f"cache.C: UC placement needs M*C <= K, got M={c.M}, C={c.C}, K={c.K}")
    return spec


def load_config(path) -> ExperimentSpec:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    return loads(text)


def loads(text: str) -> ExperimentSpec:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"<config>: parse error: {exc}") from None
    return spec_from_dict(data)


def _value(spec: ExperimentSpec, target: str, attr: str):
    sc = spec.scenario
    obj = {
        "budget": sc.budget,
        "sr": sc.sr,
        "mobility": sc.mobility,
        "terrestrial": sc.terrestrial,
        "cache": sc.cache,
        "scenario": sc,
        "sweep": spec.sweep,
        "outputs": spec.outputs,
        "sim": spec.sim,
        "spec": spec,
    }[target]
    return getattr(obj, attr)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    raise TypeError(v)


def dumps(spec: ExperimentSpec) -> str:
    """Serialise every key (``None`` values are omitted) in schema order."""
    lines = []
    for section, keys in _SCHEMA.items():
        lines.append(f"[{section}]")
        for key, (target, attr, _) in keys.items():
            v = _value(spec, target, attr)
            if v is None:
                continue
            lines.append(f"{key} = {_fmt(v)}")
        lines.append("")
    return "\n".join(lines)


def schema_keys() -> dict[str, list[str]]:
    return {s: list(k) for s, k in _SCHEMA.items()}


__all__ = ["ConfigError", "ExperimentSpec", "Outputs", "Sweep", "dumps", "load_config", "loads", "schema_keys", "spec_from_dict", "validate"]
