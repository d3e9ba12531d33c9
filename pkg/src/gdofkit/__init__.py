# src.gdofkit.__init__.py

"""
GDoF toolkit for the MISO broadcast channel with finite precision CSIT.

Exact outer bounds and achievable regions for three users, the
layered-superposition schemes that reach them, K-user bound generation and
a finite-power simulator.
"""

from .core.channel import ChannelMatrix, check_sls_conditions, compute_deltas
from .core.factory import get_generation_budget, get_sim_config, load_package_config
from .core.patterns import GenerationBudget, enumerate_outer_bounds
from .core.polytope import Polytope, poly_equal
from .core.regions import achievability_verdict, outer_region
from .core.simulator import SimConfig, simulate_scheme

__version__ = "0.1.0"
__all__ = [
    "ChannelMatrix",
    "check_sls_conditions",
    "compute_deltas",
    "Polytope",
    "poly_equal",
    "outer_region",
    "achievability_verdict",
    "GenerationBudget",
    "enumerate_outer_bounds",
    "SimConfig",
    "simulate_scheme",
    "load_package_config",
    "get_generation_budget",
    "get_sim_config",
]
