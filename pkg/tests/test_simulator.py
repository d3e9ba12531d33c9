"""
Finite-power simulation of an SLS scheme.
"""

import logging
from fractions import Fraction as F

import numpy as np
import pandas as pd
import pytest

from gdofkit.core.errors import InfeasibleSchemeError
from gdofkit.core.factory import get_sim_config
from gdofkit.core.simulator import SimConfig, simulate_scheme, slope_estimate
from gdofkit.core.sls import RateSplit, SlsParams, SlsScheme

logging.basicConfig(level=logging.INFO)


@pytest.fixture
def corner_scheme(example_channel) -> SlsScheme:
    """D scheme reaching (6/5, 1/5, 1/10) on the example channel."""
    return SlsScheme(
        "D123",
        SlsParams(F(9, 10), F(1, 5), 0, 0),
        RateSplit((F(1, 10), F(1, 5), F(1, 10)), F(1, 5), F(9, 10)),
        example_channel,
    )


@pytest.fixture
def sim_cfg(test_cfg) -> SimConfig:
    return get_sim_config(test_cfg)


def test_slopes_approach_design(corner_scheme, sim_cfg):
    print("=== Testing Rate Slopes ===")
    result = simulate_scheme(corner_scheme, sim_cfg)
    slopes = slope_estimate(result)
    for k, (slope, design) in enumerate(zip(slopes, (1.2, 0.2, 0.1))):
        assert abs(slope - design) < 0.1, f"user {k + 1}: slope {slope:.3f} vs design {design}"
    print(f"✅ Slopes {[round(s, 3) for s in slopes]}")


def test_frames_and_convergence(corner_scheme, sim_cfg):
    result = simulate_scheme(corner_scheme, sim_cfg)
    assert list(result.layers.columns) == [
        "P", "receiver", "layer", "mean_normalized_rate", "design_load", "gap", "shortfall",
    ]
    assert len(result.layers) == 8 * len(sim_cfg.P_grid)
    assert len(result.users) == 3 * len(sim_cfg.P_grid)

    gaps = result.convergence["mean_gap"].to_numpy()
    assert gaps[-1] < gaps[0], f"Mean gap should shrink with P: {gaps}"

    at_1e8 = result.layers[result.layers["P"] == 1e8]
    assert (at_1e8["gap"] < 0.15).all(), at_1e8.to_string()

    summary = result.summary()
    assert summary["variant"] == "D123" and summary["seed"] == sim_cfg.seed


def test_determinism(corner_scheme, sim_cfg):
    a = simulate_scheme(corner_scheme, sim_cfg)
    b = simulate_scheme(corner_scheme, sim_cfg)
    pd.testing.assert_frame_equal(a.layers, b.layers)
    pd.testing.assert_frame_equal(a.users, b.users)


def test_silencing_never_hurts(corner_scheme, sim_cfg):
    base = simulate_scheme(corner_scheme, sim_cfg)
    quiet_cfg = SimConfig(**{**vars(sim_cfg), "silenced_layers": ["X3"]})
    quiet = simulate_scheme(corner_scheme, quiet_cfg)

    keys = ["P", "receiver", "layer"]
    merged = base.layers.merge(quiet.layers, on=keys, suffixes=("_base", "_quiet"))
    others = merged[merged["layer"] != "X3"]
    assert (
        others["mean_normalized_rate_quiet"] >= others["mean_normalized_rate_base"] - 1e-12
    ).all()


def test_infeasible_scheme(corner_scheme, sim_cfg):
    overloaded = SlsScheme(
        corner_scheme.variant,
        corner_scheme.params,
        RateSplit((F(1, 10), F(1, 5), F(1, 10)), F(1, 5), 1),
        corner_scheme.channel,
    )
    with pytest.raises(InfeasibleSchemeError):
        simulate_scheme(overloaded, sim_cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(P_grid=[1.0, 10.0])
    with pytest.raises(ValueError):
        SimConfig(P_grid=[1e6, 1e4])
    with pytest.raises(ValueError):
        SimConfig(trials=0)
    with pytest.raises(ValueError):
        SimConfig(silenced_layers=["X4"])


def test_slope_needs_two_powers(corner_scheme):
    result = simulate_scheme(corner_scheme, SimConfig(P_grid=[1e6], trials=10))
    with pytest.raises(ValueError):
        slope_estimate(result)


def test_slope_spread_shrinks_with_trials(corner_scheme):
    print("=== Testing Slope Spread ===")

    def spread(trials: int) -> float:
        slopes = [
            slope_estimate(
                simulate_scheme(
                    corner_scheme, SimConfig(P_grid=[1e6, 1e8], trials=trials, seed=s, max_workers=1)
                )
            )[0]
            for s in range(60)
        ]
        return float(np.std(slopes))

    ratio = spread(80) / spread(20)
    assert 0.3 < ratio < 0.75, f"Expected about 1/2, got {ratio:.3f}"
    print(f"✅ Spread ratio {ratio:.3f}")


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
