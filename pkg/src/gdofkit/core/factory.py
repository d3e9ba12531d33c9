"""
Factory functions that turn the packaged Hydra configs into objects.
"""

import logging
from importlib.resources import files
from typing import Any, Optional

from hydra import compose, initialize_config_dir
from hydra.core.global_hydra import GlobalHydra
from hydra.utils import instantiate
from omegaconf import DictConfig, OmegaConf

from gdofkit.core.patterns import GenerationBudget
from gdofkit.core.simulator import SimConfig
from gdofkit.utils.validators import is_valid_bounds_config, is_valid_sim_config

logger = logging.getLogger(__name__)


def get_package_config_path() -> str:
    """Get path to package's default configs."""
    return str(files("gdofkit") / "conf")


def load_package_config(
    config_name: str = "config", overrides: Optional[list] = None
) -> DictConfig:
    """
    Load and return the composed config.

    Args:
        config_name: Name of the config file (without .yaml)
        overrides: List of config overrides (e.g., ["bounds.depth=1"])
    """
    config_path = get_package_config_path()
    logger.debug(f"Getting hydra config: {config_name=}, {overrides=}.")

    # Clear any existing Hydra instance
    GlobalHydra.instance().clear()

    try:
        with initialize_config_dir(config_dir=config_path, version_base=None):
            cfg = compose(config_name=config_name, overrides=overrides or [])
        return cfg
    finally:
        GlobalHydra.instance().clear()


def get_generation_budget(config: DictConfig, **changes: Any) -> GenerationBudget:
    """
    Instantiate the bounds budget; keyword arguments replace single fields.
    """
    if config and is_valid_bounds_config(config):
        budget: GenerationBudget = instantiate(config.bounds, **changes)
        logger.debug(f"Generation budget: {budget}")
        return budget
    logger.error("Error getting the generation budget from config.")
    raise ValueError("config has no valid 'bounds' section")


def get_sim_config(config: DictConfig, **changes: Any) -> SimConfig:
    if config and is_valid_sim_config(config):
        sim: SimConfig = instantiate(config.sim, **changes)
        logger.debug(f"Simulation config:\n{OmegaConf.to_yaml(config.sim)}")
        return sim
    logger.error("Error getting the simulation config.")
    raise ValueError("config has no valid 'sim' section")
