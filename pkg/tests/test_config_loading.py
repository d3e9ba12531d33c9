"""
Test Hydra config loading and composition.
"""

import logging

import pytest
from omegaconf import DictConfig, OmegaConf

from gdofkit.core.factory import get_generation_budget, get_sim_config, load_package_config
from gdofkit.core.patterns import GenerationBudget
from gdofkit.core.simulator import SimConfig
from gdofkit.utils.validators import is_valid_bounds_config, is_valid_sim_config

# Configure logging
logging.basicConfig(level=logging.INFO)


def test_config_loading(monkeypatch):
    """Test that Hydra correctly loads and composes package configs."""

    print("=== Testing Config Loading ===")
    for var in ("GDOF_BUDGET_DEPTH", "GDOF_BUDGET_MAX_SIZE", "GDOF_BUDGET_MAX_PATTERNS"):
        monkeypatch.delenv(var, raising=False)

    cfg = load_package_config()
    print(OmegaConf.to_yaml(cfg))

    print("\n=== Validating Expected Values ===")
    assert cfg.package.name == "gdofkit", f"Expected package.name=gdofkit, got {cfg.package.name}"
    assert cfg.bounds.depth == 2, f"Expected bounds.depth=2, got {cfg.bounds.depth}"
    assert cfg.bounds.max_patterns == 100_000
    assert cfg.channel.max_relabel_antennas == 6
    assert cfg.checks.duality_instances == 1000
    print("✅ Default config loaded correctly")

    budget = get_generation_budget(cfg)
    assert isinstance(budget, GenerationBudget) and budget.depth == 2
    sim = get_sim_config(cfg)
    assert isinstance(sim, SimConfig)
    assert list(sim.P_grid) == [1e4, 1e6, 1e8, 1e10]
    assert sim.silenced_layers == []
    print("\n🎉 All config tests passed!")


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("GDOF_BUDGET_DEPTH", "1")
    monkeypatch.setenv("GDOF_BUDGET_MAX_PATTERNS", "500")
    budget = get_generation_budget(load_package_config())
    assert budget.depth == 1 and budget.max_patterns == 500, f"Got {budget}"

    budget = get_generation_budget(load_package_config(), depth=3)
    assert budget.depth == 3


def test_load_config_from_str():
    file_name: str = "test_config"
    cfg: DictConfig = load_package_config(config_name=file_name)
    print(f"File string: {file_name =}\n{OmegaConf.to_yaml(cfg)}.")
    assert cfg.checks.duality_instances == 40
    assert cfg.sim.seed == 7 and cfg.sim.max_workers == 2
    assert get_generation_budget(cfg).max_size == 6

    cfg = load_package_config(config_name=file_name, overrides=["sim.trials=5"])
    assert get_sim_config(cfg).trials == 5


def test_invalid_configs():
    empty = OmegaConf.create({})
    assert not is_valid_bounds_config(empty)
    assert not is_valid_sim_config(empty)

    wrong = OmegaConf.create({"sim": {"_target_": "builtins.dict", "trials": 3}})
    assert not is_valid_sim_config(wrong)
    with pytest.raises(ValueError):
        get_sim_config(wrong)
    with pytest.raises(ValueError):
        get_generation_budget(OmegaConf.create({"package": {"name": "gdofkit"}}))


if __name__ == "__main__":
    # Run all tests
    pytest.main([__file__, "-v", "-s"])

    print("\n🚀 All tests completed successfully!")
