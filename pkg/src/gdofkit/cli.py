"""
Exact GDoF regions and layered-superposition schemes for the MISO
broadcast channel with finite precision CSIT.

Usage:
    gdofkit check (<channel> | --cyclic <a> <b>) [options]
    gdofkit region (<channel> | --cyclic <a> <b>) [--vertices] [options]
    gdofkit verify-equivalence <channel> [--progress] [options]
    gdofkit verify-scheme <scheme> [options]
    gdofkit params-for-vertex <channel> <d1> <d2> <d3> [--part=<label>] [options]
    gdofkit kbounds (<channel> | --K=<n>) [--depth=<d>] [--max-size=<s>] [--max-patterns=<n>] [--explain=<row>] [options]
    gdofkit cyclic-sweep [--step=<step>] [options]
    gdofkit simulate <scheme> [--trials=<n>] [--seed=<seed>] [--P=<grid>] [--summary=<file>] [--progress] [options]
    gdofkit dual-check (<channel> | --random=<n>) [--seed=<seed>] [--progress] [options]
    gdofkit -h | --help
    gdofkit --version

Options:
    -o OUT, --out OUT       Write the JSON/CSV result to OUT instead of stdout
    --log-level LEVEL       Logging level [default: WARNING]
    --config NAME           Packaged config to compose [default: config]
    --cyclic                Use the cyclic channel (1, a, b) instead of a file
    --vertices              Also list the vertices of the region
    --part=<label>          Achievable part such as D213 or F123
    --K=<n>                 Channel-free symbolic bounds for n users
    --depth=<d>             Merge depth of the pattern generator
    --max-size=<s>          Largest pattern (number of permutations)
    --max-patterns=<n>      Pattern budget
    --explain=<row>         Print the inequality chain of one surviving row
    --step=<step>           Grid step 1/n over [0,1]^2 [default: 1/64]
    --trials=<n>            Fading draws per power
    --seed=<seed>           RNG seed
    --P=<grid>              Comma separated powers, e.g. 1e4,1e6,1e8
    --summary=<file>        Also write the JSON run summary to this file
    --random=<n>            Check n random conforming channels
    --progress              Show a progress bar

Numbers on the command line and in files are read exactly: "1.2" is 6/5.
Exit status is 0 for a true verdict, 1 for a false one and 2 for bad input.
"""

import json
import logging
import sys
from concurrent.futures import Future, ThreadPoolExecutor, as_completed
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from docopt import DocoptExit, docopt
from tqdm import tqdm

from gdofkit import __version__
from gdofkit.core.channel import (
    ChannelMatrix,
    check_sls_conditions,
    compute_deltas,
    cyclic_channel,
    dual,
    random_conforming_channel,
    sls_regime_mask,
    tin_regime_mask,
)
from gdofkit.core.factory import get_generation_budget, get_sim_config, load_package_config
from gdofkit.core.models import ChannelModel, PolytopeModel, SchemeModel, load_model
from gdofkit.core.patterns import bound_templates, enumerate_outer_bounds, explain
from gdofkit.core.polytope import Polytope, poly_equal, vertices
from gdofkit.core.regions import (
    achievability_verdict,
    cyclic_region,
    in_cyclic_regime,
    outer_region,
)
from gdofkit.core.simulator import simulate_scheme, slope_estimate
from gdofkit.core.sls import certify_point, sinr_exponents, validate_rate_split
from gdofkit.utils.rationals import format_fraction, to_fraction

logger = logging.getLogger(__name__)

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


class StatusInfo:
    """Human readable status lines on stderr; stdout carries only data."""

    def __call__(self, line: str = "") -> None:
        print(line, file=sys.stderr)


def _fr(values) -> List[str]:
    return [format_fraction(v) for v in values]


def _poly(p: Polytope) -> Dict[str, Any]:
    return PolytopeModel.from_polytope(p).model_dump(mode="json")


def _emit(opts: Dict, payload: Any) -> None:
    """Write JSON (dict) or CSV (DataFrame) to --out or stdout."""
    if isinstance(payload, pd.DataFrame):
        text = payload.to_csv(index=False)
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if opts["--out"]:
        with open(opts["--out"], "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _channel(opts: Dict) -> ChannelMatrix:
    if opts["--cyclic"]:
        return cyclic_channel(to_fraction(opts["<a>"]), to_fraction(opts["<b>"]))
    return load_model(opts["<channel>"], ChannelModel).to_channel()


def cmd_check(opts: Dict, cfg, info: StatusInfo) -> int:
    ch = _channel(opts)
    report = check_sls_conditions(ch, max_relabel_antennas=cfg.channel.max_relabel_antennas)
    if report.satisfied and report.identity_labeling:
        info("conditions satisfied (identity labeling)")
    elif report.satisfied:
        info(f"conditions satisfied (antennas relabeled as {tuple(t + 1 for t in report.witness_permutation)})")
    else:
        info("conditions violated")
        for v in report.violations:
            info(f"  {v.render()}")
        if report.identity_only:
            info("  (only the identity antenna labeling was checked)")
    outer = outer_region(ch)
    for line in outer.render():
        info(f"  {line}")
    _emit(
        opts,
        {
            "satisfied": report.satisfied,
            "witness_permutation": (
                [t + 1 for t in report.witness_permutation] if report.witness_permutation else None
            ),
            "identity_only": report.identity_only,
            "violations": [v.render() for v in report.violations],
            "outer_region": _poly(outer),
        },
    )
    return EXIT_TRUE if report.satisfied else EXIT_FALSE


def cmd_region(opts: Dict, cfg, info: StatusInfo) -> int:
    ch = _channel(opts)
    outer = outer_region(ch)
    payload: Dict[str, Any] = {"outer_region": _poly(outer)}
    for line in outer.render():
        info(line)
    if opts["--cyclic"] and in_cyclic_regime(opts["<a>"], opts["<b>"]):
        closed = cyclic_region(opts["<a>"], opts["<b>"])
        payload["cyclic_region"] = _poly(closed)
        payload["cyclic_matches"] = poly_equal(outer, closed)
        info(f"closed form matches: {payload['cyclic_matches']}")
    if opts["--vertices"]:
        verts = sorted(vertices(outer, max_rows=cfg.polytope.max_vertex_rows))
        payload["vertices"] = [_fr(v) for v in verts]
    _emit(opts, payload)
    return EXIT_TRUE


def cmd_verify_equivalence(opts: Dict, cfg, info: StatusInfo) -> int:
    ch = _channel(opts)
    verdict = achievability_verdict(
        ch,
        max_workers=cfg.regions.max_workers,
        progress=opts["--progress"] or cfg.regions.progress,
        max_relabel_antennas=cfg.channel.max_relabel_antennas,
    )
    if verdict.equal:
        info(f"outer region achieved by {verdict.matched_part}")
    elif not verdict.tight_known:
        info("conditions fail: outer bound not known tight")
    else:
        info("no achievable part equals the outer region")
    _emit(
        opts,
        {
            "equal": verdict.equal,
            "matched_part": verdict.matched_part,
            "predicted_part": verdict.predicted_part,
            "tight_known": verdict.tight_known,
            "conditions_satisfied": verdict.conditions.satisfied,
            "notes": list(verdict.notes),
            "outer_region": _poly(verdict.outer),
            "parts": {
                label: (_poly(p) if p is not None else None)
                for label, p in verdict.achievable_parts.items()
            },
        },
    )
    return EXIT_TRUE if verdict.equal else EXIT_FALSE


def cmd_verify_scheme(opts: Dict, cfg, info: StatusInfo) -> int:
    scheme = load_model(opts["<scheme>"], SchemeModel).to_scheme()
    valid, induced = validate_rate_split(scheme)
    report = sinr_exponents(scheme)
    for line in report.render():
        info(line)
    info(f"split valid: {valid}, induced d = ({', '.join(_fr(induced))}), feasible: {report.feasible}")
    _emit(
        opts,
        {
            "variant": scheme.variant,
            "split_valid": valid,
            "induced": _fr(induced),
            "feasible": report.feasible,
            "entries": [
                {
                    "receiver": e.receiver,
                    "layer": e.layer,
                    "exponent": format_fraction(e.exponent),
                    "gdof": format_fraction(e.gdof),
                    "load": format_fraction(e.load),
                    "ok": e.ok,
                    "formula": e.formula,
                }
                for e in report.entries
            ],
        },
    )
    return EXIT_TRUE if valid and report.feasible else EXIT_FALSE


def cmd_params_for_vertex(opts: Dict, cfg, info: StatusInfo) -> int:
    ch = _channel(opts)
    point = [to_fraction(opts[k]) for k in ("<d1>", "<d2>", "<d3>")]
    cert = certify_point(ch, point, opts["--part"])
    vp = cert.vertex_params
    if vp is None:
        info("no parameters found")
        _emit(opts, {"found": False, "point": _fr(point)})
        return EXIT_FALSE
    info(f"{vp.part}: {vp.params.render()} ({vp.source}), certified: {cert.certified}")
    _emit(
        opts,
        {
            "found": True,
            "point": _fr(point),
            "part": vp.part,
            "variant": vp.variant,
            "source": vp.source,
            "params": _fr(vp.params.as_tuple()),
            "local_point": _fr(vp.local_point),
            "split": (
                {
                    "d_single": _fr(cert.split.d_single),
                    "d_pair": format_fraction(cert.split.d_pair),
                    "d_all": format_fraction(cert.split.d_all),
                    "mu": _fr(cert.split.mu),
                    "xi": _fr(cert.split.xi),
                }
                if cert.split is not None
                else None
            ),
            "certified": cert.certified,
        },
    )
    return EXIT_TRUE if cert.certified else EXIT_FALSE


def _budget(opts: Dict, cfg):
    changes = {}
    for flag, key in (("--depth", "depth"), ("--max-size", "max_size"), ("--max-patterns", "max_patterns")):
        if opts[flag] is not None:
            changes[key] = int(opts[flag])
    return get_generation_budget(cfg, **changes)


def cmd_kbounds(opts: Dict, cfg, info: StatusInfo) -> int:
    if opts["--K"] and opts["--explain"] is not None:
        logger.error("--explain needs a channel, not --K.")
        raise ValueError("--explain cannot be combined with --K")
    budget = _budget(opts, cfg)
    if opts["--K"]:
        K = int(opts["--K"])
        templates = bound_templates(K, budget)
        info(f"K = {K}: {len(templates.bounds)} symbolic bounds from {templates.emitted} patterns")
        if templates.truncated:
            info("pattern budget exhausted: the list is truncated")
        _emit(
            opts,
            {
                "K": K,
                "truncated": templates.truncated,
                "patterns": templates.emitted,
                "bounds": [
                    {
                        "inequality": t.render(),
                        "derivation": t.pattern.derivation.describe() if t.pattern else None,
                    }
                    for t in templates.bounds
                ],
            },
        )
        return EXIT_TRUE

    ch = _channel(opts)
    result = enumerate_outer_bounds(ch, budget)
    info(f"{len(result.polytope.hrep)} irredundant rows, truncated: {result.truncated}")
    if opts["--explain"] is not None:
        row = int(opts["--explain"])
        if not 0 <= row < len(result.bounds):
            logger.error(f"--explain {row} outside 0..{len(result.bounds) - 1}")
            raise ValueError(f"row {row} does not exist")
        for line in explain(result.bounds[row], compute_deltas(ch)):
            info(line)
    _emit(
        opts,
        {
            "K": ch.K,
            "truncated": result.truncated,
            "patterns": result.patterns,
            "polytope": _poly(result.polytope),
            "rows": [
                {
                    "inequality": b.render(),
                    "provenance": b.provenance,
                    "derivation": (
                        b.pattern.derivation.describe()
                        if b.pattern is not None and b.pattern.derivation is not None
                        else None
                    ),
                }
                for b in result.bounds
            ],
        },
    )
    return EXIT_TRUE


def cmd_cyclic_sweep(opts: Dict, cfg, info: StatusInfo) -> int:
    step = to_fraction(opts["--step"])
    if not 0 < step <= 1 or step.numerator != 1:
        logger.error(f"Sweep step must be 1/n with n >= 1, got {step}.")
        raise ValueError(f"step {step} is not of the form 1/n")
    n = step.denominator
    sls = sls_regime_mask(n)
    tin = tin_regime_mask(n)
    rows = []
    for i in range(n + 1):
        a = Fraction(i, n)
        for j in range(n + 1):
            b = Fraction(j, n)
            closed = in_cyclic_regime(a, b)
            rows.append(
                {
                    "a": format_fraction(a),
                    "b": format_fraction(b),
                    "sls_regime": bool(sls[i, j]),
                    "tin_regime": bool(tin[i, j]),
                    "single_bound": "1" if closed else "",
                    "pair_bound": format_fraction(2 - b) if closed else "",
                    "sum_bound": format_fraction(3 - 2 * b) if closed else "",
                }
            )
    info(f"sls area ≈ {float(np.mean(sls)):.4f}, tin area ≈ {float(np.mean(tin)):.4f}")
    _emit(opts, pd.DataFrame(rows))
    return EXIT_TRUE


def cmd_simulate(opts: Dict, cfg, info: StatusInfo) -> int:
    scheme = load_model(opts["<scheme>"], SchemeModel).to_scheme()
    changes: Dict[str, Any] = {}
    if opts["--trials"] is not None:
        changes["trials"] = int(opts["--trials"])
    if opts["--seed"] is not None:
        changes["seed"] = int(opts["--seed"])
    if opts["--P"] is not None:
        changes["P_grid"] = [float(x) for x in opts["--P"].split(",")]
    if opts["--progress"]:
        changes["progress"] = True
    sim_cfg = get_sim_config(cfg, **changes)
    result = simulate_scheme(scheme, sim_cfg)
    summary = result.summary()
    if len(sim_cfg.P_grid) >= 2:
        summary["slopes"] = list(slope_estimate(result))
    info(json.dumps(summary))
    if opts["--summary"]:
        with open(opts["--summary"], "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
    columns = ["P", "receiver", "layer", "mean_normalized_rate", "design_load", "gap", "shortfall"]
    _emit(opts, result.layers[columns])
    return EXIT_TRUE


def _dual_equal(ch: ChannelMatrix) -> bool:
    return poly_equal(outer_region(ch), outer_region(dual(ch)))


def cmd_dual_check(opts: Dict, cfg, info: StatusInfo) -> int:
    if opts["--random"] is None:
        ch = _channel(opts)
        equal = _dual_equal(ch)
        info(f"outer region equals that of the dual: {equal}")
        _emit(opts, {"checked": 1, "equal": int(equal), "failures": [] if equal else [ch.render()]})
        return EXIT_TRUE if equal else EXIT_FALSE

    count = int(opts["--random"])
    seed = int(opts["--seed"]) if opts["--seed"] is not None else cfg.checks.seed
    rng = np.random.default_rng(seed)
    channels = [
        random_conforming_channel(rng, denominator=cfg.channel.denominator) for _ in range(count)
    ]
    failures = []
    with ThreadPoolExecutor(max_workers=cfg.regions.max_workers) as executor:
        futures_to_channel: Dict[Future, ChannelMatrix] = {
            executor.submit(_dual_equal, ch): ch for ch in channels
        }
        with tqdm(
            total=len(channels), desc="Dual check", unit="channel", disable=not opts["--progress"]
        ) as pbar:
            for future in as_completed(futures_to_channel):
                try:
                    if not future.result():
                        failures.append(futures_to_channel[future].render())
                finally:
                    pbar.update(1)
    failures.sort()
    info(f"{count - len(failures)} of {count} channels match their dual")
    _emit(opts, {"checked": count, "equal": count - len(failures), "failures": failures})
    return EXIT_TRUE if not failures else EXIT_FALSE


COMMANDS = {
    "check": cmd_check,
    "region": cmd_region,
    "verify-equivalence": cmd_verify_equivalence,
    "verify-scheme": cmd_verify_scheme,
    "params-for-vertex": cmd_params_for_vertex,
    "kbounds": cmd_kbounds,
    "cyclic-sweep": cmd_cyclic_sweep,
    "simulate": cmd_simulate,
    "dual-check": cmd_dual_check,
}


def main(args: Optional[List[str]] = None) -> int:
    try:
        opts = docopt(__doc__, args, version=__version__)
    except DocoptExit as e:
        print(e, file=sys.stderr)
        return EXIT_INPUT

    info = StatusInfo()
    command = next(name for name in COMMANDS if opts[name])
    try:
        level = opts["--log-level"].upper()
        if not isinstance(logging.getLevelName(level), int):
            logger.error(f"Unknown log level {level!r}.")
            raise ValueError(f"unknown log level {opts['--log-level']!r}")
        logging.basicConfig(level=level)
        cfg = load_package_config(config_name=opts["--config"])
        return COMMANDS[command](opts, cfg, info)
    except (ValueError, OSError) as e:
        # GdofError, pydantic's ValidationError and JSONDecodeError are ValueErrors
        info(f"error: {e}")
        logger.debug("Input error details:", exc_info=True)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
