# src/gdofkit/utils/__init__.py

from .rationals import format_fraction, to_fraction
from .validators import is_valid_bounds_config, is_valid_sim_config

__all__ = [
    "to_fraction",
    "format_fraction",
    "is_valid_bounds_config",
    "is_valid_sim_config",
]
