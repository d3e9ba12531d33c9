import logging

from omegaconf import DictConfig, OmegaConf

logger = logging.getLogger(__name__)

BUDGET_KEYS = ("depth", "max_size", "max_patterns", "full_order_limit", "prune_every")
SIM_KEYS = ("P_grid", "trials", "fading_low", "fading_high", "seed")


def _has_target(config: DictConfig, section: str, expected: str) -> bool:
    target = OmegaConf.select(config, f"{section}._target_")
    logger.debug(f"{section} _target_: {target}")
    if target != expected:
        logger.error(f"'{section}._target_' should be {expected}, found {target}")
        return False
    return True


def is_valid_bounds_config(config: DictConfig) -> bool:
    """
    Validate the bounds section using OmegaConf's safe access methods.
    """
    logger.debug("=== Bounds Config Validation ===")
    try:
        section = OmegaConf.select(config, "bounds")
        logger.debug(f"Bounds section found: {section is not None}")
        if section is None:
            logger.error("Missing 'bounds' section in config")
            return False

        if not _has_target(config, "bounds", "gdofkit.core.patterns.GenerationBudget"):
            return False

        for key in BUDGET_KEYS:
            if OmegaConf.select(config, f"bounds.{key}") is None:
                logger.error(f"Missing 'bounds.{key}' in config")
                return False

        logger.debug("✅ Bounds config validation passed")
        return True

    except Exception as e:
        logger.error(f"Bounds config validation failed: {e}")
        logger.debug("Validation error details:", exc_info=True)
        return False


def is_valid_sim_config(config: DictConfig) -> bool:
    logger.debug("=== Sim Config Validation ===")
    try:
        section = OmegaConf.select(config, "sim")
        if section is None:
            logger.error("Missing 'sim' section in config")
            return False

        if not _has_target(config, "sim", "gdofkit.core.simulator.SimConfig"):
            return False

        for key in SIM_KEYS:
            if OmegaConf.select(config, f"sim.{key}") is None:
                logger.error(f"Missing 'sim.{key}' in config")
                return False

        # optional
        if OmegaConf.select(config, "sim.max_workers") is None:
            logger.warning("sim.max_workers not found, using default")

        logger.debug("✅ Sim config validation passed")
        return True

    except Exception as e:
        logger.error(f"Sim config validation failed: {e}")
        logger.debug("Validation error details:", exc_info=True)
        return False
