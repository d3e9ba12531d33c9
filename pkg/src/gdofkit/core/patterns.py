"""
Outer bounds for the K-user channel generated from bounding patterns.

A bounding pattern is a pair (A, B) of multisets of permutations. Seeds
are ``((0, p1), p)`` for every permutation p of at least two users, two
patterns may be added, and two permutations of B may be merged at a shared
user. Every pattern yields one inequality: each user counts once per
occurrence past the head of a permutation, and the rhs is the sum of
``f(p)`` over the pattern.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from gdofkit.core.channel import ChannelMatrix, DeltaSet, compute_deltas
from gdofkit.core.errors import BudgetError, InvalidChannelError, InvalidPermutationError
from gdofkit.core.polytope import LinearInequality, Polytope, remove_redundant
from gdofkit.utils.rationals import format_fraction

logger = logging.getLogger(__name__)

MAX_USERS: int = 8

Permutation = Tuple[int, ...]
DeltaTerm = Tuple[int, ...]  # (x,) is delta_x, (a, b) is delta_{a,b}


def _check_permutation(p: Sequence[int], name: str) -> Permutation:
    p = tuple(int(x) for x in p)
    if len(set(p)) != len(p):
        logger.error(f"{name} = {p} repeats an element.")
        raise InvalidPermutationError(f"{name} {p} has repeated elements")
    if 0 in p[1:] or (p[:1] == (0,) and len(p) != 2):
        logger.error(f"{name} = {p} uses 0 outside a (0, x) head.")
        raise InvalidPermutationError(f"{name} {p}: 0 may only open a length-2 permutation")
    return p


@dataclass(frozen=True)
class MergeResult:
    u1: Permutation
    u2: Permutation
    u3: Permutation
    u4: Permutation

    def as_tuple(self) -> Tuple[Permutation, Permutation, Permutation, Permutation]:
        return (self.u1, self.u2, self.u3, self.u4)


def _ordering(given: Optional[Sequence[int]], elems: set, name: str) -> Tuple[int, ...]:
    if given is None:
        return tuple(sorted(elems))
    given = tuple(given)
    if len(given) != len(elems) or set(given) != elems:
        logger.error(f"{name} {given} is not an ordering of {sorted(elems)}.")
        raise InvalidPermutationError(f"{name} {given} must order {sorted(elems)}")
    return given


def merge(
    p: Sequence[int],
    q: Sequence[int],
    shared: int,
    u3_order: Optional[Sequence[int]] = None,
    u4_order: Optional[Sequence[int]] = None,
) -> MergeResult:
    """
    Merge ``p`` and ``q`` at ``shared``.

    u1 and u2 are the prefixes of p and q ending at the shared user, u3 and
    u4 start at it and continue through the users after it in both (u3) or
    either (u4) of the inputs. Tails default to ascending order.
    """
    p, q = _check_permutation(p, "p"), _check_permutation(q, "q")
    if len(p) < 2 or len(q) < 2:
        logger.error(f"Merge needs two permutations of length > 1: {p = }, {q = }")
        raise InvalidPermutationError("both permutations need length > 1")
    if shared not in p or shared not in q:
        logger.error(f"{shared = } is not in both {p} and {q}.")
        raise InvalidPermutationError(f"{shared} does not occur in both permutations")
    k, l = p.index(shared), q.index(shared)
    p_tail, q_tail = set(p[k + 1 :]), set(q[l + 1 :])
    u3 = (shared,) + _ordering(u3_order, p_tail & q_tail, "u3 ordering")
    u4 = (shared,) + _ordering(u4_order, p_tail | q_tail, "u4 ordering")
    return MergeResult(p[: k + 1], q[: l + 1], u3, u4)


def f_terms(p: Sequence[int]) -> Tuple[DeltaTerm, ...]:
    p = tuple(p)
    if len(p) <= 1:
        return ()
    if p[0] == 0:
        return ((p[1],),)
    return tuple((p[t], p[t - 1]) for t in range(1, len(p)))


def evaluate_term(term: DeltaTerm, ds: DeltaSet) -> Fraction:
    if len(term) == 1:
        return ds.delta_i[term[0] - 1]
    return ds.delta_ij[term[0] - 1][term[1] - 1]


def render_term(term: DeltaTerm) -> str:
    return "δ" + ",".join(str(t) for t in term)


def f_of_p(p: Sequence[int], ds: DeltaSet) -> Fraction:
    return sum((evaluate_term(t, ds) for t in f_terms(p)), Fraction(0))


# ------------------------------------------------------------ derivations


@dataclass(frozen=True)
class Seed:
    perm: Permutation

    def replay(self) -> "BoundingPattern":
        return BoundingPattern(((0, self.perm[0]),), (self.perm,), self)

    def describe(self) -> str:
        return f"seed{self.perm}"


@dataclass(frozen=True)
class Combine:
    left: "Derivation"
    right: "Derivation"

    def replay(self) -> "BoundingPattern":
        a, b = self.left.replay(), self.right.replay()
        return BoundingPattern(a.A + b.A, a.B + b.B, self)

    def describe(self) -> str:
        return f"({self.left.describe()} + {self.right.describe()})"


@dataclass(frozen=True)
class MergeStep:
    parent: "Derivation"
    first: Permutation
    second: Permutation
    shared: int
    u3_tail: Tuple[int, ...]
    u4_tail: Tuple[int, ...]

    def replay(self) -> "BoundingPattern":
        base = self.parent.replay()
        rest = list(base.B)
        rest.remove(self.first)
        rest.remove(self.second)
        u = merge(self.first, self.second, self.shared, self.u3_tail, self.u4_tail)
        return BoundingPattern(base.A + (u.u1, u.u2), tuple(rest) + (u.u3, u.u4), self)

    def describe(self) -> str:
        return (
            f"merge[{self.first}, {self.second} at {self.shared} -> "
            f"u3 tail {self.u3_tail}, u4 tail {self.u4_tail}]({self.parent.describe()})"
        )


Derivation = Union[Seed, Combine, MergeStep]


@dataclass(frozen=True)
class BoundingPattern:
    A: Tuple[Permutation, ...]
    B: Tuple[Permutation, ...]
    derivation: Optional[Derivation] = field(default=None, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", tuple(sorted(self.A)))
        object.__setattr__(self, "B", tuple(sorted(self.B)))

    @property
    def size(self) -> int:
        return len(self.A) + len(self.B)

    @property
    def key(self) -> Tuple[Tuple[Permutation, ...], Tuple[Permutation, ...]]:
        return (self.A, self.B)

    def permutations(self) -> Tuple[Permutation, ...]:
        return self.A + self.B

    def render(self) -> str:
        a = ", ".join(str(p) for p in self.A)
        b = ", ".join(f"{p}̄" for p in self.B)
        return "{" + ", ".join(x for x in (a, b) if x) + "}"


def _combine(x: BoundingPattern, y: BoundingPattern) -> BoundingPattern:
    return BoundingPattern(x.A + y.A, x.B + y.B, Combine(x.derivation, y.derivation))


@dataclass(frozen=True)
class GenerationBudget:
    depth: int = 2
    max_size: int = 8
    max_patterns: int = 100_000
    full_order_limit: int = 4
    prune_every: int = 256

    def __post_init__(self) -> None:
        if self.depth < 0:
            logger.error(f"Merge depth must be >= 0, got {self.depth}.")
            raise BudgetError(f"depth = {self.depth} < 0")
        if self.max_size < 2:
            logger.error(f"Pattern size cap must be >= 2, got {self.max_size}.")
            raise BudgetError(f"max_size = {self.max_size} < 2")
        if self.max_patterns < 1:
            logger.error("Pattern budget is zero.")
            raise BudgetError(f"max_patterns = {self.max_patterns} < 1")
        if self.full_order_limit < 0 or self.prune_every < 1:
            logger.error(f"{self.full_order_limit = }, {self.prune_every = } out of range.")
            raise BudgetError("full_order_limit must be >= 0 and prune_every >= 1")


def _tail_orderings(elems: set, limit: int) -> List[Tuple[int, ...]]:
    ordered = tuple(sorted(elems))
    if len(ordered) <= limit:
        return list(permutations(ordered))
    return [ordered]


def seed_patterns(K: int) -> List[BoundingPattern]:
    seeds = []
    for r in range(2, K + 1):
        for subset in combinations(range(1, K + 1), r):
            for perm in permutations(subset):
                seeds.append(Seed(perm).replay())
    return seeds


class PatternGenerator:
    """
    Deterministic stream of bounding patterns for ``K`` users.

    Seeds come first. Each further level takes the previous level's merge
    results, optionally adds one seed, and applies every merge of two B
    permutations. ``truncated`` is set when the pattern budget stops the
    stream early.
    """

    def __init__(self, K: int, budget: Optional[GenerationBudget] = None) -> None:
        if K < 2:
            logger.error(f"Pattern generation needs K >= 2, got {K}.")
            raise InvalidChannelError(f"K = {K} < 2")
        self.K = K
        self.budget = budget or GenerationBudget()
        self.truncated = False
        self.emitted = 0

    def expand(self, base: BoundingPattern) -> Iterator[BoundingPattern]:
        """Every pattern one merge away from ``base``."""
        limit = self.budget.full_order_limit
        candidates = [i for i, q in enumerate(base.B) if len(q) > 1]
        done = set()
        for i, j in combinations(candidates, 2):
            first, second = base.B[i], base.B[j]
            if (first, second) in done:
                continue
            done.add((first, second))
            rest = base.B[:i] + base.B[i + 1 : j] + base.B[j + 1 :]
            for shared in first:
                if shared not in second:
                    continue
                k, l = first.index(shared), second.index(shared)
                p_tail, q_tail = set(first[k + 1 :]), set(second[l + 1 :])
                for t3 in _tail_orderings(p_tail & q_tail, limit):
                    for t4 in _tail_orderings(p_tail | q_tail, limit):
                        u = merge(first, second, shared, t3, t4)
                        yield BoundingPattern(
                            base.A + (u.u1, u.u2),
                            rest + (u.u3, u.u4),
                            MergeStep(base.derivation, first, second, shared, t3, t4),
                        )

    def __iter__(self) -> Iterator[BoundingPattern]:
        budget = self.budget
        seen = set()
        seeds = seed_patterns(self.K)
        for pattern in seeds:
            if self.emitted >= budget.max_patterns:
                self.truncated = True
                return
            seen.add(pattern.key)
            self.emitted += 1
            yield pattern

        frontier = seeds
        for level in range(1, budget.depth + 1):
            logger.debug(f"Merge level {level}: {len(frontier)} patterns in the frontier.")
            next_frontier: List[BoundingPattern] = []
            for x in frontier:
                bases = [x] + [_combine(x, s) for s in seeds]
                for base in bases:
                    if base.size + 2 > budget.max_size:
                        continue
                    for merged in self.expand(base):
                        if merged.key in seen:
                            continue
                        if self.emitted >= budget.max_patterns:
                            self.truncated = True
                            logger.warning(
                                f"Pattern budget {budget.max_patterns} reached at level {level}."
                            )
                            return
                        seen.add(merged.key)
                        self.emitted += 1
                        next_frontier.append(merged)
                        yield merged
            frontier = next_frontier
            if not frontier:
                break


def generate_patterns(K: int, budget: Optional[GenerationBudget] = None) -> Iterator[BoundingPattern]:
    return iter(PatternGenerator(K, budget))


# ------------------------------------------------------------ bounds


def pattern_coefficients(pat: BoundingPattern, K: int) -> Tuple[int, ...]:
    coeffs = [0] * K
    for p in pat.permutations():
        for x in p[1:]:
            if x > K:
                logger.error(f"User {x} in {pat.render()} exceeds K = {K}.")
                raise InvalidPermutationError(f"user {x} > K = {K}")
            coeffs[x - 1] += 1
    return tuple(coeffs)


@dataclass(frozen=True)
class SymbolicBound:
    """``coeffs . d <= sum of terms``, the rhs kept as delta symbols."""

    coeffs: Tuple[int, ...]
    terms: Tuple[DeltaTerm, ...]
    pattern: Optional[BoundingPattern] = field(default=None, compare=False, hash=False)

    def evaluate(self, ds: DeltaSet) -> Fraction:
        return sum((evaluate_term(t, ds) for t in self.terms), Fraction(0))

    def render(self) -> str:
        lhs = " + ".join(
            (f"{c}d{i + 1}" if c > 1 else f"d{i + 1}") for i, c in enumerate(self.coeffs) if c
        )
        rhs = " + ".join(render_term(t) for t in self.terms) or "0"
        return f"{lhs} <= {rhs}"


@dataclass(frozen=True)
class GdofBound:
    coeffs: Tuple[int, ...]
    rhs: Fraction
    provenance: str
    pattern: Optional[BoundingPattern] = field(default=None, compare=False)

    def inequality(self) -> LinearInequality:
        return LinearInequality.canonical(self.coeffs, self.rhs)

    def render(self) -> str:
        lhs = " + ".join(
            (f"{c}d{i + 1}" if c > 1 else f"d{i + 1}") for i, c in enumerate(self.coeffs) if c
        )
        return f"{lhs} <= {format_fraction(self.rhs)}"


def symbolic_bound(pat: BoundingPattern, K: int) -> SymbolicBound:
    terms = tuple(sorted(t for p in pat.permutations() for t in f_terms(p)))
    return SymbolicBound(pattern_coefficients(pat, K), terms, pat)


def bound_from_pattern(pat: BoundingPattern, ds: DeltaSet) -> GdofBound:
    K = len(ds.delta_i)
    rhs = sum((f_of_p(p, ds) for p in pat.permutations()), Fraction(0))
    return GdofBound(pattern_coefficients(pat, K), rhs, pat.render(), pat)


@dataclass(frozen=True)
class TemplateSet:
    bounds: Tuple[SymbolicBound, ...]
    truncated: bool
    emitted: int


@lru_cache(maxsize=16)
def bound_templates(K: int, budget: GenerationBudget) -> TemplateSet:
    """Channel-independent bounds of every generated pattern, deduplicated."""
    gen = PatternGenerator(K, budget)
    found: Dict[Tuple, SymbolicBound] = {}
    for pattern in gen:
        bound = symbolic_bound(pattern, K)
        found.setdefault((bound.coeffs, bound.terms), bound)
    logger.info(f"K = {K}: {gen.emitted} patterns, {len(found)} distinct bounds.")
    return TemplateSet(tuple(found.values()), gen.truncated, gen.emitted)


@dataclass(frozen=True)
class BoundEnumeration:
    polytope: Polytope
    truncated: bool
    bounds: Tuple[GdofBound, ...]
    patterns: int


def _box_bounds(ds: DeltaSet) -> List[GdofBound]:
    K = len(ds.delta_i)
    found = []
    for i in range(K):
        coeffs = tuple(int(t == i) for t in range(K))
        found.append(GdofBound(coeffs, ds.delta_i[i], f"d{i + 1} <= δ{i + 1}"))
    return found


def enumerate_outer_bounds(
    ch: ChannelMatrix, budget: Optional[GenerationBudget] = None
) -> BoundEnumeration:
    budget = budget or GenerationBudget()
    K = ch.K
    if not 2 <= K <= MAX_USERS:
        logger.error(f"Bound enumeration supports 2 <= K <= {MAX_USERS}, got {K}.")
        raise InvalidChannelError(f"K = {K} outside [2, {MAX_USERS}]")
    ds = compute_deltas(ch)
    templates = bound_templates(K, budget)
    if templates.truncated:
        logger.warning(f"Pattern stream truncated after {templates.emitted} patterns.")

    best: Dict[LinearInequality, GdofBound] = {}
    nonneg = [LinearInequality.canonical([-int(t == i) for t in range(K)], 0) for i in range(K)]
    candidates = _box_bounds(ds) + [
        GdofBound(t.coeffs, t.evaluate(ds), t.render(), t.pattern) for t in templates.bounds
    ]

    rows: List[LinearInequality] = list(nonneg)
    pending = 0
    for bound in candidates:
        row = bound.inequality()
        direction = LinearInequality.canonical(row.coeffs, 0)
        current = best.get(direction)
        if current is not None and current.inequality().rhs <= row.rhs:
            continue
        best[direction] = bound
        rows.append(row)
        pending += 1
        if pending >= budget.prune_every:
            rows = list(remove_redundant(Polytope(K, tuple(rows))).hrep)
            pending = 0

    polytope = remove_redundant(Polytope(K, tuple(rows)))
    kept = []
    for row in polytope.hrep:
        bound = best.get(LinearInequality.canonical(row.coeffs, 0))
        if bound is not None and bound.inequality() == row:
            kept.append(bound)
    logger.info(f"Outer bound for K = {K}: {len(polytope.hrep)} rows after pruning.")
    return BoundEnumeration(polytope, templates.truncated, tuple(kept), templates.emitted)


def explain(bound: GdofBound, ds: Optional[DeltaSet] = None) -> List[str]:
    """Inequality chain of a pattern bound, one line per permutation."""
    lines = [bound.render()]
    if bound.pattern is None:
        lines.append(f"  {bound.provenance}")
        return lines
    for p in bound.pattern.permutations():
        terms = f_terms(p)
        text = " + ".join(render_term(t) for t in terms) or "0"
        line = f"  f{p} = {text}"
        if ds is not None:
            line += f" = {format_fraction(f_of_p(p, ds))}"
        lines.append(line)
    if bound.pattern.derivation is not None:
        lines.append(f"  from {bound.pattern.derivation.describe()}")
    return lines
