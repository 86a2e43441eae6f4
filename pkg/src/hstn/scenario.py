"""Scenario description shared by the analysis and the simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .caching import SCHEMES, CacheLayout, Scheme
from .channel import LinkBudget, NakagamiParams, SrFadingParams, db_to_linear
from .mobility import Mode, MobilityParams, check_mode


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything that defines one network: fleet geometry/mobility, both
    fading laws, cache layout, satellite link budget and the target rate
    (bit/s/Hz)."""

    mobility: MobilityParams = field(default_factory=MobilityParams)
    sr: SrFadingParams = field(default_factory=SrFadingParams)
    terrestrial: NakagamiParams = field(default_factory=NakagamiParams)
    cache: CacheLayout = field(default_factory=CacheLayout)
    budget: LinkBudget = field(default_factory=LinkBudget)
    rate: float = 1.0

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("target rate must be positive")

    @property
    def M(self) -> int:
        return self.cache.M

    @property
    def gamma_th1(self) -> float:
        return 2.0 ** (2 * self.rate) - 1.0

    @property
    def gamma_th2(self) -> float:
        return 2.0**self.rate - 1.0

    def with_triplet(self, M: int, N: int, m_ud: int) -> "ScenarioConfig":
        """Copy with relay count, satellite antennas and terrestrial severity set."""
        return replace(
            self,
            cache=replace(self.cache, M=M),
            sr=replace(self.sr, N=N),
            terrestrial=replace(self.terrestrial, m_ud=m_ud),
        )

    def with_lambda(self, lam: float) -> "ScenarioConfig":
        return replace(self, cache=replace(self.cache, lam=lam))


@dataclass(frozen=True)
class OutageQuery:
    """One evaluation point: scenario, SNR scales of both hops, scheme, mode."""

    scenario: ScenarioConfig
    eta_s: float
    eta_u: float
    scheme: Scheme = "NC"
    mode: Mode = "fully3D"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown caching scheme {self.scheme!r}")
        check_mode(self.mode)
        if not (self.eta_s > 0 and self.eta_u > 0):
            raise ValueError("SNR scales must be positive")

    @classmethod
    def at_snr_db(cls, scenario: ScenarioConfig, snr_db: float, scheme="NC", mode="fully3D", eta_s_db=None):
        """Query with ``eta_u = 10^(snr_db/10)``; ``eta_s`` equals it unless
        ``eta_s_db`` is given."""
        eta = float(db_to_linear(snr_db))
        es = eta if eta_s_db is None else float(db_to_linear(eta_s_db))
        return cls(scenario, es, eta, scheme, mode)

    @property
    def gamma_th1(self) -> float:
        return self.scenario.gamma_th1

    @property
    def gamma_th2(self) -> float:
        return self.scenario.gamma_th2

    @property
    def snr_db(self) -> float:
        return 10 * math.log10(self.eta_u)
