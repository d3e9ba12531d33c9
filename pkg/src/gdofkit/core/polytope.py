"""
Exact polyhedra in half-space form.

Every row is stored canonically (first nonzero coefficient scaled to
absolute value 1) so two representations of the same inequality compare
equal. Redundancy removal and boundedness checks go through the exact
simplex in ``gdofkit.core.simplex``; vertices are found by solving every
square subsystem of tight rows.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from gdofkit.core.errors import (
    DimensionMismatchError,
    UnboundedRegionError,
    VertexLimitError,
)
from gdofkit.core.simplex import OPTIMAL, UNBOUNDED, find_feasible_point, maximize
from gdofkit.utils.rationals import RationalLike, format_fraction, to_fraction

logger = logging.getLogger(__name__)

MAX_VERTEX_ROWS: int = 64

Point = Tuple[Fraction, ...]


@dataclass(frozen=True, order=True)
class LinearInequality:
    """``coeffs . x <= rhs`` in canonical scaling."""

    coeffs: Tuple[Fraction, ...]
    rhs: Fraction

    @classmethod
    def canonical(
        cls, coeffs: Sequence[RationalLike], rhs: RationalLike
    ) -> "LinearInequality":
        coeffs = tuple(to_fraction(c) for c in coeffs)
        rhs = to_fraction(rhs)
        lead = next((c for c in coeffs if c != 0), None)
        if lead is None:
            # all-zero row: either always true or a contradiction
            return cls(coeffs, Fraction(0) if rhs >= 0 else Fraction(-1))
        scale = 1 / abs(lead)
        return cls(tuple(c * scale for c in coeffs), rhs * scale)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @property
    def is_trivial(self) -> bool:
        return not any(self.coeffs) and self.rhs >= 0

    @property
    def is_contradiction(self) -> bool:
        return not any(self.coeffs) and self.rhs < 0

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.coeffs, x) if c), Fraction(0))

    def holds(self, x: Sequence[Fraction]) -> bool:
        return self.evaluate(x) <= self.rhs

    def is_tight(self, x: Sequence[Fraction]) -> bool:
        return self.evaluate(x) == self.rhs

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or [f"d{t + 1}" for t in range(self.dim)]
        terms = []
        for c, name in zip(self.coeffs, names):
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{format_fraction(abs(c))} "
            terms.append(f"{sign} {mag}{name}")
        if not terms:
            return f"0 <= {format_fraction(self.rhs)}"
        text = " ".join(terms)
        text = text[2:] if text.startswith("+ ") else "-" + text[2:]
        return f"{text} <= {format_fraction(self.rhs)}"


def _dedup_rows(rows: Iterable[LinearInequality]) -> Tuple[LinearInequality, ...]:
    best: Dict[Tuple[Fraction, ...], LinearInequality] = {}
    contradiction = None
    for row in rows:
        if row.is_trivial:
            continue
        if row.is_contradiction:
            contradiction = row
            continue
        kept = best.get(row.coeffs)
        if kept is None or row.rhs < kept.rhs:
            best[row.coeffs] = row
    if contradiction is not None:
        return (contradiction,)
    return tuple(sorted(best.values()))


@dataclass(frozen=True)
class Polytope:
    """
    Half-space representation of a region of R^dim.

    Rows with identical coefficients are merged (the tighter one stays) and
    the remaining rows are kept sorted, so equal H-reps compare equal. A
    region known to be empty is stored as the single row ``0 <= -1``.
    """

    dim: int
    hrep: Tuple[LinearInequality, ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            logger.error(f"Polytope dimension must be positive: {self.dim = }")
            raise DimensionMismatchError(f"bad dimension {self.dim}")
        for row in self.hrep:
            if row.dim != self.dim:
                logger.error(f"Row of dimension {row.dim} in a {self.dim}-dim region.")
                raise DimensionMismatchError(
                    f"row {row} does not have dimension {self.dim}"
                )
        object.__setattr__(self, "hrep", _dedup_rows(self.hrep))

    @classmethod
    def from_rows(
        cls,
        dim: int,
        rows: Iterable[Tuple[Sequence[RationalLike], RationalLike]],
    ) -> "Polytope":
        return cls(dim, tuple(LinearInequality.canonical(c, r) for c, r in rows))

    @classmethod
    def empty(cls, dim: int) -> "Polytope":
        return cls(dim, (LinearInequality.canonical([0] * dim, -1),))

    @classmethod
    def box(
        cls, upper: Sequence[RationalLike], lower: Optional[Sequence[RationalLike]] = None
    ) -> "Polytope":
        dim = len(upper)
        lower = lower if lower is not None else [0] * dim
        rows = []
        for t in range(dim):
            rows.append((unit(dim, t), upper[t]))
            rows.append((unit(dim, t, -1), -to_fraction(lower[t])))
        return cls.from_rows(dim, rows)

    @property
    def matrix(self) -> Tuple[List[List[Fraction]], List[Fraction]]:
        return [list(r.coeffs) for r in self.hrep], [r.rhs for r in self.hrep]

    @property
    def is_marked_empty(self) -> bool:
        return any(r.is_contradiction for r in self.hrep)

    @cached_property
    def feasible_point(self) -> Optional[Point]:
        if self.is_marked_empty:
            return None
        rows, rhs = self.matrix
        return find_feasible_point(rows, rhs, self.dim)

    @property
    def is_empty(self) -> bool:
        return self.feasible_point is None

    @cached_property
    def vrep(self) -> FrozenSet[Point]:
        return vertices(self)

    def render(self, names: Optional[Sequence[str]] = None) -> List[str]:
        return [row.render(names) for row in self.hrep]


def unit(dim: int, t: int, value: RationalLike = 1) -> List[Fraction]:
    row = [Fraction(0)] * dim
    row[t] = to_fraction(value)
    return row


def _check_point(p: Polytope, x: Sequence) -> Point:
    if len(x) != p.dim:
        logger.error(f"Point of length {len(x)} tested against a {p.dim}-dim region.")
        raise DimensionMismatchError(f"point {tuple(x)} is not {p.dim}-dimensional")
    return tuple(to_fraction(v) for v in x)


def contains_point(p: Polytope, x: Sequence[RationalLike]) -> bool:
    point = _check_point(p, x)
    return all(row.holds(point) for row in p.hrep)


def is_empty(p: Polytope) -> bool:
    return p.is_empty


def is_bounded(p: Polytope) -> bool:
    """True when every coordinate is bounded above and below (or p is empty)."""
    if p.is_empty:
        return True
    rows, rhs = p.matrix
    for t in range(p.dim):
        for sign in (1, -1):
            if maximize(unit(p.dim, t, sign), rows, rhs).status == UNBOUNDED:
                return False
    return True


def remove_redundant(p: Polytope) -> Polytope:
    """
    Drop every row implied by the rows that remain.

    Rows are visited in canonical order and a row is discarded when the
    maximum of its left side over the kept rows does not exceed its rhs.
    An infeasible input comes back as ``Polytope.empty``.
    """
    if p.is_empty:
        logger.debug(f"remove_redundant: region of dim {p.dim} is empty.")
        return Polytope.empty(p.dim)

    kept = list(p.hrep)
    idx = 0
    while idx < len(kept):
        row = kept[idx]
        others = kept[:idx] + kept[idx + 1 :]
        result = maximize(
            row.coeffs, [list(r.coeffs) for r in others], [r.rhs for r in others]
        )
        if result.status == OPTIMAL and result.value <= row.rhs:
            kept.pop(idx)
        else:
            idx += 1
    logger.debug(f"remove_redundant: {len(p.hrep)} -> {len(kept)} rows.")
    return Polytope(p.dim, tuple(kept))


def fm_eliminate(p: Polytope, var: int, prune: bool = True) -> Polytope:
    """Project ``p`` onto all coordinates but ``var``."""
    if not 0 <= var < p.dim:
        logger.error(f"Cannot eliminate {var = } from a {p.dim}-dim region.")
        raise DimensionMismatchError(f"variable {var} out of range")
    if p.dim == 1:
        logger.error("Eliminating the last coordinate would leave dimension 0.")
        raise DimensionMismatchError("cannot project to dimension 0")
    if p.is_marked_empty:
        return Polytope.empty(p.dim - 1)

    zero, pos, neg = _split_by_sign(p.hrep, var)
    new_rows = [_drop(row.coeffs, var) + (row.rhs,) for row in zero]
    for rp in pos:
        for rn in neg:
            a, b = rp.coeffs[var], -rn.coeffs[var]
            coeffs = [b * x + a * y for x, y in zip(rp.coeffs, rn.coeffs)]
            new_rows.append(_drop(coeffs, var) + (b * rp.rhs + a * rn.rhs,))

    projected = Polytope.from_rows(p.dim - 1, [(r[:-1], r[-1]) for r in new_rows])
    return remove_redundant(projected) if prune else projected


def _split_by_sign(rows, var):
    zero, pos, neg = [], [], []
    for row in rows:
        c = row.coeffs[var]
        (pos if c > 0 else neg if c < 0 else zero).append(row)
    return zero, pos, neg


def _drop(seq: Sequence[Fraction], var: int) -> Tuple[Fraction, ...]:
    return tuple(seq[:var]) + tuple(seq[var + 1 :])


def fm_project(
    p: Polytope,
    keep: Sequence[int],
    cb_step: Optional[Callable[[int, int, int, int, int], None]] = None,
) -> Polytope:
    """
    Eliminate every coordinate not listed in ``keep``.

    Each step picks the remaining column with the smallest p*n product
    (rows with positive times rows with negative coefficient), ties going to
    the lowest index, and prunes after every step. The result keeps the
    coordinates of ``keep`` in ascending order.
    """
    keep = sorted(set(keep))
    labels = list(range(p.dim))
    current = p
    logger.debug(f"Eliminate: {p.dim} -> {len(keep)} columns.")
    while len(labels) > len(keep):
        choices = []
        for pos_idx, label in enumerate(labels):
            if label in keep:
                continue
            z, pos, neg = _split_by_sign(current.hrep, pos_idx)
            choices.append((len(pos) * len(neg), pos_idx, len(z), len(pos), len(neg)))
        cost, col, z, np_, nn = min(choices)
        logger.debug(
            f"  {len(labels):3}, col={labels[col]:3}, z={z:4}, p+n={np_ + nn:3}, p*n={cost:4}"
        )
        if cb_step is not None:
            cb_step(len(labels), labels[col], z, np_, nn)
        current = fm_eliminate(current, col)
        labels.pop(col)
    return current


def vertices(p: Polytope, max_rows: int = MAX_VERTEX_ROWS) -> FrozenSet[Point]:
    """
    Exact extreme points of a bounded region.

    Every ``dim``-subset of the pruned rows is solved as a square system;
    feasible unique solutions are basic feasible points, hence vertices.
    """
    pruned = remove_redundant(p)
    if pruned.is_marked_empty:
        return frozenset()
    if not is_bounded(pruned):
        logger.error(f"Vertex enumeration on an unbounded {p.dim}-dim region.")
        raise UnboundedRegionError("region is unbounded")
    if len(pruned.hrep) > max_rows:
        logger.error(f"{len(pruned.hrep)} rows exceed the vertex limit {max_rows}.")
        raise VertexLimitError(f"{len(pruned.hrep)} rows > {max_rows}")

    found = set()
    for subset in combinations(pruned.hrep, p.dim):
        x = solve_square([list(r.coeffs) for r in subset], [r.rhs for r in subset])
        if x is not None and all(row.holds(x) for row in pruned.hrep):
            found.add(x)
    logger.debug(f"vertices: {len(found)} extreme points from {len(pruned.hrep)} rows.")
    return frozenset(found)


def solve_square(A: List[List[Fraction]], b: List[Fraction]) -> Optional[Point]:
    """Gauss-Jordan on an exact square system; None when singular."""
    n = len(b)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            return None
        M[col], M[pivot] = M[pivot], M[col]
        inv = 1 / M[col][col]
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return tuple(M[r][n] for r in range(n))


def poly_subset(a: Polytope, b: Polytope) -> bool:
    """True iff every vertex of ``a`` satisfies every row of ``b``."""
    if a.dim != b.dim:
        logger.error(f"Comparing regions of dimension {a.dim} and {b.dim}.")
        raise DimensionMismatchError(f"{a.dim} != {b.dim}")
    verts = a.vrep
    if not verts:
        return True
    return all(all(row.holds(v) for row in b.hrep) for v in verts)


def poly_equal(a: Polytope, b: Polytope) -> bool:
    return poly_subset(a, b) and poly_subset(b, a)


def intersect(a: Polytope, b: Polytope) -> Polytope:
    if a.dim != b.dim:
        logger.error(f"Intersecting regions of dimension {a.dim} and {b.dim}.")
        raise DimensionMismatchError(f"{a.dim} != {b.dim}")
    return Polytope(a.dim, a.hrep + b.hrep)


def permute_coordinates(p: Polytope, perm: Sequence[int]) -> Polytope:
    """Move coordinate ``t`` to position ``perm[t]``."""
    if sorted(perm) != list(range(p.dim)):
        logger.error(f"{perm = } is not a permutation of range({p.dim}).")
        raise DimensionMismatchError(f"bad permutation {perm}")
    rows = []
    for row in p.hrep:
        coeffs = [Fraction(0)] * p.dim
        for t, c in enumerate(row.coeffs):
            coeffs[perm[t]] = c
        rows.append((coeffs, row.rhs))
    return Polytope.from_rows(p.dim, rows)
