"""
Finite-power Monte Carlo check of an SLS scheme.

For every nominal power P the fading draws ``G_km`` are uniform on
[fading_low, fading_high], layers are decoded in the scheme's order with
everything undecoded treated as noise, and each rate is reported
normalized by ``1/2 log P``. As P grows the normalized rates approach the
GDoF loads the scheme was designed for.
"""

import logging
from concurrent.futures import Future, ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from gdofkit.core import sinr_tables
from gdofkit.core.errors import InfeasibleSchemeError
from gdofkit.core.sls import SlsScheme, sinr_exponents, symbol_environment

logger = logging.getLogger(__name__)


@dataclass
class SimConfig:
    P_grid: List[float] = field(default_factory=lambda: [1e4, 1e6, 1e8, 1e10])
    trials: int = 200
    fading_low: float = 0.5
    fading_high: float = 1.5
    seed: int = 0
    max_workers: int = 4
    silenced_layers: List[str] = field(default_factory=list)
    progress: bool = False

    def __post_init__(self) -> None:
        self.P_grid = [float(P) for P in self.P_grid]
        self.silenced_layers = list(self.silenced_layers)
        if not self.P_grid or any(P <= 1 for P in self.P_grid):
            logger.error(f"Every power must exceed 1: {self.P_grid = }")
            raise ValueError("P_grid needs values > 1")
        if sorted(self.P_grid) != self.P_grid:
            logger.error(f"P_grid must be ascending: {self.P_grid}")
            raise ValueError("P_grid must be ascending")
        if self.trials < 1:
            logger.error(f"{self.trials = } < 1")
            raise ValueError("trials must be >= 1")
        if not 0 < self.fading_low <= self.fading_high:
            logger.error(f"Bad fading bounds {self.fading_low = }, {self.fading_high = }")
            raise ValueError("need 0 < fading_low <= fading_high")
        unknown = set(self.silenced_layers) - set(sinr_tables.LAYERS)
        if unknown:
            logger.error(f"Unknown layers to silence: {sorted(unknown)}")
            raise ValueError(f"unknown layers {sorted(unknown)}")


@dataclass
class SimResult:
    variant: str
    config: SimConfig
    layers: pd.DataFrame
    users: pd.DataFrame

    @property
    def convergence(self) -> pd.DataFrame:
        """Mean absolute gap between rate and load, per power."""
        return (
            self.layers.groupby("P", sort=True)["gap"].mean().rename("mean_gap").reset_index()
        )

    def summary(self) -> Dict:
        return {
            "variant": self.variant,
            "P_grid": self.config.P_grid,
            "trials": self.config.trials,
            "seed": self.config.seed,
            "mean_gap": self.convergence["mean_gap"].tolist(),
        }


def _layer_powers(P: float, env: Dict[str, float], silenced: List[str]) -> Dict[str, float]:
    powers = {}
    for layer in sinr_tables.LAYERS:
        if layer in silenced:
            powers[layer] = 0.0
        elif layer == "X123":
            powers[layer] = max(1.0 - 2.0 * P ** (-env["lam"]), 0.0)
        else:
            powers[layer] = P ** float(sinr_tables.POWER[layer].evaluate(env))
    return powers


def _simulate_power(
    scheme: SlsScheme, P: float, seq: np.random.SeedSequence, cfg: SimConfig
) -> Tuple[List[Dict], np.ndarray]:
    """Layer rows for one power and the per-trial normalized user rates (trials x 3)."""
    rng = np.random.default_rng(seq)
    env_exact = symbol_environment(scheme.channel, scheme.params)
    env = {k: float(v) for k, v in env_exact.items()}
    G = rng.uniform(cfg.fading_low, cfg.fading_high, size=(cfg.trials, 3, 3))
    powers = _layer_powers(P, env, cfg.silenced_layers)
    log_p = np.log(P)

    def received(k: int, layer: str) -> np.ndarray:
        amp = np.zeros(cfg.trials)
        for m in sinr_tables.ANTENNAS[layer]:
            gain = float(
                env[f"a{k}{m}"] - sinr_tables.attenuation(scheme.variant, m).evaluate(env_exact)
            )
            amp += np.sqrt(P**gain) * G[:, k - 1, m - 1]
        return powers[layer] * amp**2

    loads = {k: float(v) for k, v in scheme.split.layer_loads().items()}
    rows = []
    per_layer: Dict[str, List[np.ndarray]] = {}
    for k, order in sinr_tables.DECODING_ORDER.items():
        rx = {layer: received(k, layer) for layer in sinr_tables.LAYERS}
        for pos, layer in enumerate(order):
            decoded = set(order[: pos + 1])
            noise = 1.0 + sum(rx[t] for t in sinr_tables.LAYERS if t not in decoded)
            rate = np.log1p(rx[layer] / noise) / log_p
            per_layer.setdefault(layer, []).append(rate)
            mean_rate = float(np.mean(rate))
            rows.append(
                {
                    "P": P,
                    "receiver": k,
                    "layer": layer,
                    "mean_normalized_rate": mean_rate,
                    "design_load": loads[layer],
                    "gap": abs(mean_rate - loads[layer]),
                    "shortfall": max(loads[layer] - mean_rate, 0.0),
                }
            )

    # a common layer is limited by its weakest intended receiver
    layer_rate = {layer: np.min(np.vstack(r), axis=0) for layer, r in per_layer.items()}
    split = scheme.split
    shares = {
        "X1": (1.0, 0.0, 0.0),
        "X2": (0.0, 1.0, 0.0),
        "X3": (0.0, 0.0, 1.0),
        "X12": (float(split.mu[0]), float(split.mu[1]), 0.0),
        "X123": tuple(float(x) for x in split.xi),
    }
    users = np.zeros((cfg.trials, 3))
    for layer, rate in layer_rate.items():
        users += np.outer(rate, shares[layer])
    return rows, users


def simulate_scheme(scheme: SlsScheme, cfg: SimConfig) -> SimResult:
    report = sinr_exponents(scheme)
    if not report.feasible:
        bad = [f"rx{e.receiver}/{e.layer}" for e in report.entries if not e.ok]
        logger.error(f"Scheme is not decodable at the GDoF level: {bad}")
        raise InfeasibleSchemeError(f"loads exceed SINR exponents at {', '.join(bad)}")

    logger.debug(f"====== simulate {scheme.variant}: {cfg.P_grid = }, {cfg.trials = } ======")
    seqs = np.random.SeedSequence(cfg.seed).spawn(len(cfg.P_grid))
    results: Dict[int, Tuple[List[Dict], np.ndarray]] = {}
    with ThreadPoolExecutor(max_workers=cfg.max_workers) as executor:
        futures_to_index: Dict[Future, int] = {
            executor.submit(_simulate_power, scheme, P, seqs[idx], cfg): idx
            for idx, P in enumerate(cfg.P_grid)
        }
        with tqdm(
            total=len(futures_to_index), desc="Simulating", unit="P", disable=not cfg.progress
        ) as pbar:
            for future in as_completed(futures_to_index):
                try:
                    results[futures_to_index[future]] = future.result()
                finally:
                    pbar.update(1)

    design = [float(x) for x in scheme.split.induced_rates()]
    layer_rows: List[Dict] = []
    user_rows: List[Dict] = []
    for idx, P in enumerate(cfg.P_grid):
        rows, users = results[idx]
        layer_rows.extend(rows)
        half_log = 0.5 * np.log(P)
        for k in range(3):
            mean_norm = float(np.mean(users[:, k]))
            user_rows.append(
                {
                    "P": P,
                    "user": k + 1,
                    "mean_normalized_rate": mean_norm,
                    "mean_rate": mean_norm * half_log,
                    "design_rate": design[k],
                }
            )
    result = SimResult(scheme.variant, cfg, pd.DataFrame(layer_rows), pd.DataFrame(user_rows))
    logger.info(f"Simulation done, mean gaps {result.convergence['mean_gap'].round(4).tolist()}")
    return result


def slope_estimate(result: SimResult) -> Tuple[float, float, float]:
    """Per-user slope of rate against 1/2 log P over the two largest powers."""
    grid = sorted(result.users["P"].unique())
    if len(grid) < 2:
        logger.error(f"Slope needs two powers, the grid has {len(grid)}.")
        raise ValueError("slope_estimate needs at least two grid points")
    top = grid[-2:]
    slopes = []
    for k in (1, 2, 3):
        rows = result.users[(result.users["user"] == k) & (result.users["P"].isin(top))]
        rows = rows.sort_values("P")
        x = 0.5 * np.log(rows["P"].to_numpy())
        y = rows["mean_rate"].to_numpy()
        slope, _ = np.polyfit(x, y, 1)
        slopes.append(float(slope))
    return tuple(slopes)
