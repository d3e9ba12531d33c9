"""
Channel-strength model of the K-user MISO broadcast channel.

``alpha[k][m]`` is the strength exponent of the link from transmit
antenna m to receiver k (0-based internally, printed 1-based).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import List, Optional, Sequence, Tuple

import numpy as np

from gdofkit.core.errors import InvalidChannelError
from gdofkit.utils.rationals import RationalLike, format_fraction, to_fraction

logger = logging.getLogger(__name__)

MAX_RELABEL_ANTENNAS: int = 6

# rule names carried by ConditionReport violations
DIRECT_DOMINANCE = "direct-dominance"  # max(a_im, a_ki) <= a_ii
CROSS_SUM = "cross-sum"  # a_ki + a_im <= a_ii + a_km


@dataclass(frozen=True)
class ChannelMatrix:
    alpha: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(to_fraction(v) for v in row) for row in self.alpha)
        if len(rows) < 2:
            logger.error(f"Need at least two users, got {len(rows)}.")
            raise InvalidChannelError(f"K = {len(rows)} < 2")
        widths = {len(row) for row in rows}
        if len(widths) != 1 or 0 in widths:
            logger.error(f"Ragged or empty channel rows: {sorted(widths)}")
            raise InvalidChannelError("every row needs the same positive length")
        for k, row in enumerate(rows):
            for m, v in enumerate(row):
                if v < 0:
                    logger.error(f"Negative strength alpha{k + 1}{m + 1} = {v}.")
                    raise InvalidChannelError(
                        f"alpha[{k + 1}][{m + 1}] = {format_fraction(v)} is negative"
                    )
        object.__setattr__(self, "alpha", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RationalLike]]) -> "ChannelMatrix":
        return cls(tuple(tuple(row) for row in rows))

    @property
    def K(self) -> int:
        return len(self.alpha)

    @property
    def M(self) -> int:
        return len(self.alpha[0])

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        k, m = key
        return self.alpha[k][m]

    def a(self, k: int, m: int) -> Fraction:
        """1-based accessor, ``ch.a(1, 2)`` is alpha_12."""
        return self.alpha[k - 1][m - 1]

    def transpose(self) -> "ChannelMatrix":
        return ChannelMatrix(tuple(zip(*self.alpha)))

    def relabel_antennas(self, perm: Sequence[int]) -> "ChannelMatrix":
        """New column t is old column ``perm[t]``."""
        if sorted(perm) != list(range(self.M)):
            logger.error(f"{perm = } is not a permutation of the {self.M} antennas.")
            raise InvalidChannelError(f"bad antenna permutation {perm}")
        return ChannelMatrix(tuple(tuple(row[p] for p in perm) for row in self.alpha))

    def relabel_users(self, sigma: Sequence[int]) -> "ChannelMatrix":
        """
        Move user a to slot ``sigma[a]``; the paired antenna columns move
        with it so ``new[sigma[a]][sigma[b]] = old[a][b]``.
        """
        K = self.K
        if sorted(sigma) != list(range(K)) or self.M < K:
            logger.error(f"Cannot relabel users with {sigma = } on a {K}x{self.M} channel.")
            raise InvalidChannelError(f"bad user permutation {sigma}")
        new = [list(row) for row in self.alpha]
        for a in range(K):
            for b in range(self.M):
                col = sigma[b] if b < K else b
                new[sigma[a]][col] = self.alpha[a][b]
        return ChannelMatrix(tuple(tuple(row) for row in new))

    def leading_block(self, size: int = 3) -> "ChannelMatrix":
        if self.K < size or self.M < size:
            logger.error(f"No {size}x{size} block in a {self.K}x{self.M} channel.")
            raise InvalidChannelError(f"channel smaller than {size}x{size}")
        return ChannelMatrix(tuple(row[:size] for row in self.alpha[:size]))

    def max_cross(self) -> Fraction:
        """Largest strength among the off-diagonal links of the square part."""
        n = min(self.K, self.M)
        return max(self.alpha[l][m] for l in range(n) for m in range(n) if l != m)

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.alpha], dtype=float)

    def render(self) -> List[str]:
        return [" ".join(format_fraction(v) for v in row) for row in self.alpha]


@dataclass(frozen=True)
class DeltaSet:
    delta_i: Tuple[Fraction, ...]
    delta_ij: Tuple[Tuple[Fraction, ...], ...]
    delta3: Optional[Fraction] = None

    def pair_branches(self, i: int, k: int) -> Tuple[Fraction, Fraction]:
        return (
            self.delta_i[i] + self.delta_ij[k][i],
            self.delta_i[k] + self.delta_ij[i][k],
        )

    def pair_bound(self, i: int, k: int) -> Fraction:
        return min(self.pair_branches(i, k))

    def triple_branches(self) -> List[Fraction]:
        """The twelve candidates whose minimum is delta (K = 3 only)."""
        d, dd = self.delta_i, self.delta_ij
        values = []
        for i, j, k in permutations(range(3)):
            values.append(d[i] + dd[j][i] + dd[k][j])
            values.append((d[i] + d[k] + dd[i][j] + dd[j][i] + dd[j][k] + dd[k][i]) / 2)
        return values


def compute_deltas(ch: ChannelMatrix) -> DeltaSet:
    K = ch.K
    delta_i = tuple(max(row) for row in ch.alpha)
    delta_ij = tuple(
        tuple(
            Fraction(0)
            if i == j
            else max(max(ch.alpha[i][m] - ch.alpha[j][m], Fraction(0)) for m in range(ch.M))
            for j in range(K)
        )
        for i in range(K)
    )
    ds = DeltaSet(delta_i=delta_i, delta_ij=delta_ij)
    if K == 3:
        ds = DeltaSet(delta_i, delta_ij, min(ds.triple_branches()))
    logger.debug(f"compute_deltas: {K = }, delta_i = {[format_fraction(v) for v in delta_i]}")
    return ds


@dataclass(frozen=True)
class Violation:
    rule: str
    i: int
    k: int
    m: int
    lhs: Fraction
    rhs: Fraction

    def render(self) -> str:
        i, k, m = self.i + 1, self.k + 1, self.m + 1
        if self.rule == DIRECT_DOMINANCE:
            text = f"max(alpha{i}{m}, alpha{k}{i}) <= alpha{i}{i}"
        else:
            text = f"alpha{k}{i} + alpha{i}{m} <= alpha{i}{i} + alpha{k}{m}"
        return (
            f"{self.rule}: {text} fails "
            f"({format_fraction(self.lhs)} > {format_fraction(self.rhs)})"
        )


@dataclass(frozen=True)
class ConditionReport:
    satisfied: bool
    witness_permutation: Optional[Tuple[int, ...]]
    violations: Tuple[Violation, ...]
    identity_only: bool = False
    permutations_checked: int = 1

    @property
    def identity_labeling(self) -> bool:
        return self.witness_permutation is not None and list(
            self.witness_permutation
        ) == list(range(len(self.witness_permutation)))


def _violations(alpha: Sequence[Sequence[Fraction]], M: int) -> List[Violation]:
    found = []
    for i in range(3):
        for k in range(3):
            for m in range(M):
                lhs = max(alpha[i][m], alpha[k][i])
                if lhs > alpha[i][i]:
                    found.append(Violation(DIRECT_DOMINANCE, i, k, m, lhs, alpha[i][i]))
                lhs = alpha[k][i] + alpha[i][m]
                rhs = alpha[i][i] + alpha[k][m]
                if lhs > rhs:
                    found.append(Violation(CROSS_SUM, i, k, m, lhs, rhs))
    return found


def check_sls_conditions(
    ch: ChannelMatrix, max_relabel_antennas: int = MAX_RELABEL_ANTENNAS
) -> ConditionReport:
    """
    Test the three-user optimality conditions, relabeling antennas if needed.

    Violations are always those of the identity labeling. When it fails and
    ``M <= max_relabel_antennas`` every column permutation is tried in
    lexicographic order and the first passing one is the witness.
    """
    if ch.K != 3 or ch.M < 3:
        logger.error(f"Conditions are defined for K = 3, M >= 3; got {ch.K}x{ch.M}.")
        raise InvalidChannelError(f"need K = 3 and M >= 3, got {ch.K}x{ch.M}")

    violations = tuple(_violations(ch.alpha, ch.M))
    identity = tuple(range(ch.M))
    if not violations:
        return ConditionReport(True, identity, ())

    if ch.M > max_relabel_antennas:
        logger.warning(
            f"M = {ch.M} exceeds {max_relabel_antennas = }; only the identity labeling was checked."
        )
        return ConditionReport(False, None, violations, identity_only=True)

    checked = 1
    for perm in permutations(range(ch.M)):
        if perm == identity:
            continue
        checked += 1
        if not _violations(ch.relabel_antennas(perm).alpha, ch.M):
            logger.debug(f"Conditions hold after relabeling antennas with {perm}.")
            return ConditionReport(True, perm, violations, permutations_checked=checked)
    logger.debug(f"Conditions fail under all {checked} antenna labelings.")
    return ConditionReport(False, None, violations, permutations_checked=checked)


def dual(ch: ChannelMatrix) -> ChannelMatrix:
    if ch.K != ch.M:
        logger.error(f"Dual needs a square channel, got {ch.K}x{ch.M}.")
        raise InvalidChannelError("dual of a non-square channel")
    return ch.transpose()


def cyclic_channel(a: RationalLike, b: RationalLike) -> ChannelMatrix:
    """Three-user cyclic (1, a, b) channel: alpha12 = alpha23 = alpha31 = a, the rest b."""
    a, b = to_fraction(a), to_fraction(b)
    if a < 0 or b < 0:
        logger.error(f"Cyclic channel needs a, b >= 0: {a = }, {b = }")
        raise InvalidChannelError("cyclic strengths must be nonnegative")
    one = Fraction(1)
    return ChannelMatrix(((one, a, b), (b, one, a), (a, b, one)))


def tin_optimal_ic(ch: ChannelMatrix) -> bool:
    block = ch.leading_block(3)
    for i in range(3):
        out = max(block[i, j] for j in range(3) if j != i)
        into = max(block[k, i] for k in range(3) if k != i)
        if out + into > block[i, i]:
            return False
    return True


def random_conforming_channel(
    rng: np.random.Generator,
    denominator: int = 16,
    M: int = 3,
    max_tries: int = 10_000,
) -> ChannelMatrix:
    """
    Draw a 3-user channel that passes the conditions with identity labeling.

    Direct links are uniform on [1, 2] and every other link on [0, 1], all on
    the grid of step ``1/denominator``; draws are rejected until one passes.
    """
    for _ in range(max_tries):
        grid = rng.integers(0, denominator + 1, size=(3, M))
        for i in range(3):
            grid[i, i] += denominator
        alpha = [[Fraction(int(v), denominator) for v in row] for row in grid]
        if not _violations(alpha, M):
            return ChannelMatrix.from_rows(alpha)
    logger.error(f"No conforming channel after {max_tries} draws.")
    raise InvalidChannelError("rejection sampling did not find a conforming channel")


def _cyclic_grid(steps: int) -> np.ndarray:
    """Integer cyclic channels scaled by ``steps``: shape (steps+1, steps+1, 3, 3)."""
    a = np.arange(steps + 1).reshape(-1, 1)
    b = np.arange(steps + 1).reshape(1, -1)
    a, b = np.broadcast_arrays(a, b)
    one = np.full_like(a, steps)
    return np.stack(
        [
            np.stack([one, a, b], axis=-1),
            np.stack([b, one, a], axis=-1),
            np.stack([a, b, one], axis=-1),
        ],
        axis=-2,
    )


def sls_conditions_mask(alpha: np.ndarray) -> np.ndarray:
    """
    Vectorized condition test on integer (or scaled) arrays of shape (..., 3, M).

    Both conditions are homogeneous, so channels scaled to a common integer
    grid are classified exactly. Every antenna labeling is tried for M <= 6.
    """
    M = alpha.shape[-1]
    labelings = list(permutations(range(M))) if M <= MAX_RELABEL_ANTENNAS else [tuple(range(M))]
    result = np.zeros(alpha.shape[:-2], dtype=bool)
    for perm in labelings:
        x = alpha[..., list(perm)]
        ok = np.ones(alpha.shape[:-2], dtype=bool)
        for i in range(3):
            for k in range(3):
                for m in range(M):
                    aii = x[..., i, i]
                    ok &= np.maximum(x[..., i, m], x[..., k, i]) <= aii
                    ok &= x[..., k, i] + x[..., i, m] <= aii + x[..., k, m]
        result |= ok
    return result


def sls_regime_mask(steps: int) -> np.ndarray:
    """``mask[i, j]`` tells whether the cyclic channel (1, i/steps, j/steps) passes the conditions."""
    return sls_conditions_mask(_cyclic_grid(steps))


def tin_regime_mask(steps: int) -> np.ndarray:
    x = _cyclic_grid(steps)
    ok = np.ones(x.shape[:-2], dtype=bool)
    off = ~np.eye(3, dtype=bool)
    for i in range(3):
        out = np.max(np.where(off[i], x[..., i, :], -1), axis=-1)
        into = np.max(np.where(off[:, i], x[..., :, i], -1), axis=-1)
        ok &= out + into <= x[..., i, i]
    return ok
