"""
Three-user GDoF regions: the outer bound, the cyclic closed form, and the
twelve layered-superposition parts together with the verdict that one of
them reaches the outer bound.
"""

import logging
from concurrent.futures import Future, ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from gdofkit.core.channel import (
    ChannelMatrix,
    ConditionReport,
    check_sls_conditions,
    compute_deltas,
)
from gdofkit.core.errors import InvalidChannelError, RegimeViolationError
from gdofkit.core.polytope import Polytope, poly_equal, remove_redundant
from gdofkit.utils.rationals import RationalLike, to_fraction

logger = logging.getLogger(__name__)

VARIANTS = ("D", "F")
ORDERS: Tuple[Tuple[int, int, int], ...] = tuple(permutations((1, 2, 3)))

# Known sum bound for the cyclic (1, 2, 2) channel, strictly below the
# value 4 of outer_region there.
CYCLIC_122_TIGHTER_SUM = Fraction(15, 4)

Row = Tuple[List[Fraction], Fraction]


def _e(*idx: int) -> List[Fraction]:
    """Coefficient vector with ones at the given 0-based coordinates."""
    row = [Fraction(0)] * 3
    for t in idx:
        row[t] += 1
    return row


def _nonneg_rows(dim: int = 3) -> List[Row]:
    rows = []
    for t in range(dim):
        coeffs = [Fraction(0)] * dim
        coeffs[t] = Fraction(-1)
        rows.append((coeffs, Fraction(0)))
    return rows


def _require_three_users(ch: ChannelMatrix) -> None:
    if ch.K != 3:
        logger.error(f"Three-user region requested for K = {ch.K}.")
        raise InvalidChannelError(f"need K = 3, got K = {ch.K}")


def outer_region(ch: ChannelMatrix) -> Polytope:
    """
    Outer bound on the three-user GDoF region, valid for every channel.

    Each min() is emitted as all of its branch rows and the result pruned.
    """
    _require_three_users(ch)
    ds = compute_deltas(ch)
    rows = _nonneg_rows()
    for i in range(3):
        rows.append((_e(i), ds.delta_i[i]))
    for i in range(3):
        for k in range(i + 1, 3):
            for branch in ds.pair_branches(i, k):
                rows.append((_e(i, k), branch))
    for branch in ds.triple_branches():
        rows.append((_e(0, 1, 2), branch))
    return remove_redundant(Polytope.from_rows(3, rows))


def in_cyclic_regime(a: RationalLike, b: RationalLike) -> bool:
    a, b = to_fraction(a), to_fraction(b)
    return 0 <= a <= b <= 1 and b - a <= 1 - b


def cyclic_region(a: RationalLike, b: RationalLike) -> Polytope:
    a, b = to_fraction(a), to_fraction(b)
    if not in_cyclic_regime(a, b):
        logger.error(f"Cyclic closed form needs 0 <= a <= b <= 1 and b - a <= 1 - b: {a = }, {b = }")
        raise RegimeViolationError(f"(a, b) = ({a}, {b}) is outside the closed-form regime")
    rows = _nonneg_rows()
    for i in range(3):
        rows.append((_e(i), Fraction(1)))
    for i in range(3):
        for k in range(i + 1, 3):
            rows.append((_e(i, k), 2 - b))
    rows.append((_e(0, 1, 2), 3 - 2 * b))
    return remove_redundant(Polytope.from_rows(3, rows))


def part_label(variant: str, order: Sequence[int]) -> str:
    return variant + "".join(str(t) for t in order)


def parse_part_label(label: str) -> Tuple[str, Tuple[int, int, int]]:
    """"F123" -> ("F", (1, 2, 3))."""
    variant, digits = label[:1].upper(), label[1:]
    order = tuple(int(c) for c in digits) if digits.isdigit() else ()
    if variant not in VARIANTS or sorted(order) != [1, 2, 3]:
        logger.error(f"Unknown part label {label!r}.")
        raise ValueError(f"bad part label {label!r}")
    return variant, order


def _guard(a, i: int, j: int) -> Optional[Fraction]:
    mc = max(a[l][m] for l in range(3) for m in range(3) if l != m)
    if mc > min(a[i][i], a[j][j]):
        return None
    return mc


def achievable_D_hat(ch: ChannelMatrix, order: Sequence[int]) -> Optional[Polytope]:
    """D-type part for ``order`` (1-based), or None when its guard fails."""
    _require_three_users(ch)
    a = ch.leading_block(3).alpha
    i, j, k = (t - 1 for t in order)
    mc = _guard(a, i, j)
    if mc is None:
        logger.debug(f"D{''.join(map(str, order))}: guard fails, part is absent.")
        return None
    total = a[0][0] + a[1][1] + a[2][2]
    rows = _nonneg_rows() + [(_e(t), a[t][t]) for t in range(3)]
    rows.append((_e(i, j), a[i][i] + a[j][j] - mc))
    rows.append((_e(i, k), a[i][i] + a[k][k] - max(a[j][k], a[k][j], a[k][i], a[i][k])))
    rows.append((_e(j, k), a[j][j] + a[k][k] - max(a[j][k], a[k][j])))
    for loss in (
        mc + max(a[j][k], a[k][j]),
        a[i][k] + a[k][i],
        a[k][i] + a[i][j],
        a[j][i] + a[i][k],
    ):
        rows.append((_e(0, 1, 2), total - loss))
    return remove_redundant(Polytope.from_rows(3, rows))


def achievable_F_hat(ch: ChannelMatrix, order: Sequence[int]) -> Optional[Polytope]:
    """F-type part for ``order`` (1-based), or None when its guard fails."""
    _require_three_users(ch)
    a = ch.leading_block(3).alpha
    i, j, k = (t - 1 for t in order)
    mc = _guard(a, i, j)
    if mc is None:
        logger.debug(f"F{''.join(map(str, order))}: guard fails, part is absent.")
        return None
    total = a[0][0] + a[1][1] + a[2][2]
    rows = _nonneg_rows() + [(_e(t), a[t][t]) for t in range(3)]
    rows.append((_e(i, j), a[i][i] + a[j][j] - mc))
    rows.append((_e(i, k), a[i][i] + a[k][k] - max(a[j][k], a[k][i], a[i][k])))
    rows.append((_e(j, k), a[j][j] + a[k][k] - max(a[j][k], a[k][i], a[k][j])))
    for loss in (
        mc + max(a[k][i], a[j][k]),
        a[i][k] + a[j][i],
        a[k][j] + a[j][i],
        a[k][j] + a[i][k],
        (a[i][j] + a[i][k] + a[k][j] + a[j][i]) / 2,
    ):
        rows.append((_e(0, 1, 2), total - loss))
    return remove_redundant(Polytope.from_rows(3, rows))


def build_part(ch: ChannelMatrix, label: str) -> Optional[Polytope]:
    variant, order = parse_part_label(label)
    builder = achievable_D_hat if variant == "D" else achievable_F_hat
    return builder(ch, order)


def build_all_parts(
    ch: ChannelMatrix, max_workers: int = 4, progress: bool = False
) -> Dict[str, Optional[Polytope]]:
    labels = [part_label(v, o) for v in VARIANTS for o in ORDERS]
    parts: Dict[str, Optional[Polytope]] = {}
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures_to_label: Dict[Future, str] = {
            executor.submit(build_part, ch, label): label for label in labels
        }
        with tqdm(
            total=len(labels), desc="Building parts", unit="part", disable=not progress
        ) as pbar:
            for future in as_completed(futures_to_label):
                try:
                    parts[futures_to_label[future]] = future.result()
                finally:
                    pbar.update(1)
    return {label: parts[label] for label in labels}


def largest_cross_link(ch: ChannelMatrix) -> Tuple[int, int]:
    """0-based (l, m) of the largest off-diagonal entry, first in lexicographic order on ties."""
    a = ch.leading_block(3).alpha
    best = None
    for l in range(3):
        for m in range(3):
            if l != m and (best is None or a[l][m] > a[best[0]][best[1]]):
                best = (l, m)
    return best


def predict_matching_part(ch: ChannelMatrix) -> Tuple[str, Tuple[int, int, int]]:
    """
    Case selection for a channel that satisfies the conditions.

    The largest cross link is moved to slot (1, 2); the returned label is in
    the original user labels, the returned sigma maps user a to ``sigma[a]``.
    """
    l, m = largest_cross_link(ch)
    rest = next(t for t in range(3) if t not in (l, m))
    sigma = [0, 0, 0]
    sigma[l], sigma[m], sigma[rest] = 0, 1, 2
    x = ch.leading_block(3).relabel_users(sigma).alpha

    if max(x[0][2], x[2][0]) <= x[1][2]:
        variant, local = "D", (2, 1, 3)
    elif max(x[1][2], x[2][1]) <= x[2][0]:
        variant, local = "D", (1, 2, 3)
    else:
        variant, local = "F", (1, 2, 3)

    inverse = [0, 0, 0]
    for a, s in enumerate(sigma):
        inverse[s] = a
    order = tuple(inverse[t - 1] + 1 for t in local)
    logger.debug(f"Largest cross link alpha{l + 1}{m + 1}; predicted part {variant}{order}.")
    return part_label(variant, order), tuple(sigma)


@dataclass(frozen=True)
class RegionVerdict:
    outer: Polytope
    achievable_parts: Dict[str, Optional[Polytope]]
    matched_part: Optional[str]
    equal: bool
    conditions: ConditionReport
    predicted_part: Optional[str] = None
    tight_known: bool = True
    notes: Tuple[str, ...] = field(default_factory=tuple)


def achievability_verdict(
    ch: ChannelMatrix,
    max_workers: int = 4,
    progress: bool = False,
    max_relabel_antennas: int = 6,
) -> RegionVerdict:
    _require_three_users(ch)
    logger.debug("====== achievability verdict ======")
    conditions = check_sls_conditions(ch, max_relabel_antennas=max_relabel_antennas)
    outer = outer_region(ch)

    labeled = ch
    if conditions.satisfied:
        labeled = ch.relabel_antennas(conditions.witness_permutation)
    parts = build_all_parts(labeled, max_workers=max_workers, progress=progress)

    if not conditions.satisfied:
        logger.info("Conditions fail: outer bound reported, not known to be tight.")
        return RegionVerdict(
            outer=outer,
            achievable_parts=parts,
            matched_part=None,
            equal=False,
            conditions=conditions,
            tight_known=False,
            notes=("outer bound not known tight",),
        )

    predicted, _ = predict_matching_part(labeled)
    candidate = parts[predicted]
    if candidate is not None and poly_equal(outer, candidate):
        logger.info(f"Outer region matched by {predicted}.")
        return RegionVerdict(outer, parts, predicted, True, conditions, predicted)

    logger.warning(f"Predicted part {predicted} does not equal the outer region; scanning all parts.")
    for label, part in parts.items():
        if part is not None and poly_equal(outer, part):
            return RegionVerdict(
                outer, parts, label, True, conditions, predicted,
                notes=(f"predicted {predicted} did not match",),
            )
    return RegionVerdict(
        outer, parts, None, False, conditions, predicted,
        notes=(f"predicted {predicted} did not match",),
    )
