"""Outage analysis of a satellite-fed network of cache-enabled, 3D-mobile
amplify-and-forward UAV relays: closed forms, high-SNR asymptotes and a
seeded Monte Carlo simulator."""

from .analysis import (
    OutageResult,
    cdf_lambda_ud,
    cdf_lambda_ud_asymptotic,
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
from .caching import SCHEMES, CacheLayout, HitMass, hit_mass, zipf_pmf
from .channel import LinkBudget, NakagamiParams, SrFadingParams, db_to_linear, eta_s, linear_to_db
from .config import ConfigError, ExperimentSpec, dumps, load_config, loads
from .mobility import MODES, DistanceDistribution, Fleet, MobilityParams, UavState
from .scenario import OutageQuery, ScenarioConfig
from .simulator import SimEstimate, SimPlan, draw_samples, estimate_curve, estimate_op, run_trial
from .specfun import AccuracyError, QuadratureSpec, SpecfunDomainError

__version__ = "0.1.0"
