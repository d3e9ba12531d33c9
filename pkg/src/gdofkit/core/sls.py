"""
Layered-superposition (SLS) schemes for the three-user channel.

Two variants are supported. Both send a common layer X123, a pair layer X12
and private layers X1, X2, X3; they differ in which antenna is attenuated
by ``P^(-gamma')``. The parameter quadruple (lambda, lambda', gamma,
gamma') fixes every power level, and its feasibility constraints, the rate
caps of each layer and the resulting GDoF region are tabulated here as
data so they can be checked row by row.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from gdofkit.core import sinr_tables
from gdofkit.core.channel import ChannelMatrix, check_sls_conditions
from gdofkit.core.errors import ConstraintViolationError, InvalidChannelError
from gdofkit.core.polytope import Polytope, contains_point, fm_project
from gdofkit.core.regions import parse_part_label, predict_matching_part
from gdofkit.core.simplex import find_feasible_point, lexicographic_minimize
from gdofkit.utils.rationals import RationalLike, format_fraction, to_fraction

logger = logging.getLogger(__name__)

D123 = "D123"
F123 = "F123"
VARIANTS = (D123, F123)
PARAM_NAMES = ("lambda", "lambda'", "gamma", "gamma'")

# Coefficient vectors below are over (lambda, lambda', gamma, gamma').
Coeffs = Tuple[int, int, int, int]


def normalize_variant(variant: str) -> str:
    v = variant.upper()
    v = {"D": D123, "F": F123}.get(v, v)
    if v not in VARIANTS:
        logger.error(f"Unknown scheme variant {variant!r}.")
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return v


@dataclass(frozen=True)
class SlsParams:
    lam: Fraction
    lam_p: Fraction
    gamma: Fraction
    gamma_p: Fraction

    def __post_init__(self) -> None:
        for name, attr in zip(PARAM_NAMES, ("lam", "lam_p", "gamma", "gamma_p")):
            value = to_fraction(getattr(self, attr))
            if value < 0:
                logger.error(f"Parameter {name} = {value} is negative.")
                raise ConstraintViolationError(f"{name} >= 0 violated ({value})", row=f"{name} >= 0")
            object.__setattr__(self, attr, value)

    @classmethod
    def from_sequence(cls, values: Sequence[RationalLike]) -> "SlsParams":
        if len(values) != 4:
            logger.error(f"Expected four parameters, got {len(values)}.")
            raise ValueError("parameters are (lambda, lambda', gamma, gamma')")
        return cls(*values)

    @classmethod
    def zero(cls) -> "SlsParams":
        return cls(0, 0, 0, 0)

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.lam, self.lam_p, self.gamma, self.gamma_p)

    def dot(self, coeffs: Sequence[RationalLike]) -> Fraction:
        return sum((Fraction(c) * v for c, v in zip(coeffs, self.as_tuple())), Fraction(0))

    def render(self) -> str:
        return ", ".join(f"{n}={format_fraction(v)}" for n, v in zip(PARAM_NAMES, self.as_tuple()))


def _combo_text(coeffs: Coeffs) -> str:
    names = [n for n, c in zip(PARAM_NAMES, coeffs) if c]
    return " + ".join(names) if names else "0"


@dataclass(frozen=True)
class ConstraintRow:
    """``alpha_ij <= coeffs.p`` when ``upper`` else ``coeffs.p <= alpha_ij`` (1-based i, j)."""

    alpha: Tuple[int, int]
    coeffs: Coeffs
    upper: bool

    @property
    def name(self) -> str:
        a = f"alpha{self.alpha[0]}{self.alpha[1]}"
        combo = _combo_text(self.coeffs)
        return f"{a} <= {combo}" if self.upper else f"{combo} <= {a}"

    def slack(self, ch: ChannelMatrix, p: SlsParams) -> Fraction:
        a = ch.a(*self.alpha)
        value = p.dot(self.coeffs)
        return value - a if self.upper else a - value

    def holds(self, ch: ChannelMatrix, p: SlsParams) -> bool:
        return self.slack(ch, p) >= 0


_CONSTRAINTS: Dict[str, Tuple[ConstraintRow, ...]] = {
    D123: (
        ConstraintRow((1, 1), (1, 1, 1, 1), False),
        ConstraintRow((2, 2), (1, 1, 0, 0), False),
        ConstraintRow((3, 3), (1, 0, 0, 0), False),
        ConstraintRow((1, 2), (1, 1, 1, 0), True),
        ConstraintRow((1, 3), (1, 0, 1, 0), True),
        ConstraintRow((2, 1), (1, 1, 0, 1), True),
        ConstraintRow((2, 3), (1, 0, 0, 0), True),
        ConstraintRow((3, 1), (1, 0, 0, 1), True),
        ConstraintRow((3, 2), (1, 0, 0, 0), True),
    ),
    F123: (
        ConstraintRow((1, 1), (1, 1, 1, 0), False),
        ConstraintRow((2, 2), (1, 1, 0, 1), False),
        ConstraintRow((3, 3), (1, 0, 0, 0), False),
        ConstraintRow((1, 2), (1, 1, 1, 1), True),
        ConstraintRow((1, 3), (1, 0, 1, 0), True),
        ConstraintRow((2, 1), (1, 1, 0, 0), True),
        ConstraintRow((2, 3), (1, 0, 0, 0), True),
        ConstraintRow((3, 1), (1, 0, 0, 0), True),
        ConstraintRow((3, 2), (1, 0, 0, 1), True),
    ),
}


def param_constraints(variant: str) -> Tuple[ConstraintRow, ...]:
    return _CONSTRAINTS[normalize_variant(variant)]


def _square(ch: ChannelMatrix) -> ChannelMatrix:
    if ch.K != 3:
        logger.error(f"SLS schemes need K = 3, got K = {ch.K}.")
        raise InvalidChannelError(f"need K = 3, got K = {ch.K}")
    return ch.leading_block(3)


def violated_constraints(ch: ChannelMatrix, p: SlsParams, variant: str) -> List[ConstraintRow]:
    block = _square(ch)
    return [row for row in param_constraints(variant) if not row.holds(block, p)]


def check_params(ch: ChannelMatrix, p: SlsParams, variant: str) -> None:
    """Raise ConstraintViolationError naming the first failed row."""
    failed = violated_constraints(ch, p, variant)
    if failed:
        row = failed[0]
        logger.error(f"{normalize_variant(variant)} constraint {row.name!r} fails for {p.render()}.")
        raise ConstraintViolationError(f"constraint violated: {row.name}", row=row.name)


@dataclass(frozen=True)
class RegionRow:
    """``d_coeffs.d <= sum(alpha_tt for t in diag) - param_coeffs.p``."""

    name: str
    d_coeffs: Tuple[int, int, int]
    diag: Tuple[int, ...]
    param_coeffs: Coeffs

    def rhs(self, ch: ChannelMatrix, p: SlsParams) -> Fraction:
        return sum((ch.a(t, t) for t in self.diag), Fraction(0)) - p.dot(self.param_coeffs)


_REGION_ROWS: Dict[str, Tuple[RegionRow, ...]] = {
    D123: (
        RegionRow("d1", (1, 0, 0), (1,), (0, 0, 1, 1)),
        RegionRow("d2", (0, 1, 0), (2,), (0, 0, 0, 0)),
        RegionRow("d3", (0, 0, 1), (3,), (0, 0, 0, 0)),
        RegionRow("d1+d2", (1, 1, 0), (1, 2), (1, 1, 1, 1)),
        RegionRow("d1+d3", (1, 0, 1), (1, 3), (1, 0, 1, 1)),
        RegionRow("d2+d3", (0, 1, 1), (2, 3), (1, 0, 0, 0)),
        RegionRow("d1+d2+d3", (1, 1, 1), (1, 2, 3), (2, 1, 1, 1)),
    ),
    F123: (
        RegionRow("d1", (1, 0, 0), (1,), (0, 0, 1, 0)),
        RegionRow("d2", (0, 1, 0), (2,), (0, 0, 0, 1)),
        RegionRow("d3", (0, 0, 1), (3,), (0, 0, 0, 0)),
        RegionRow("d1+d2", (1, 1, 0), (1, 2), (1, 1, 1, 1)),
        RegionRow("d1+d3", (1, 0, 1), (1, 3), (1, 0, 1, 0)),
        RegionRow("d2+d3", (0, 1, 1), (2, 3), (1, 0, 0, 1)),
        RegionRow("d1+d2+d3", (1, 1, 1), (1, 2, 3), (2, 1, 1, 1)),
    ),
}


def region_rows(variant: str) -> Tuple[RegionRow, ...]:
    return _REGION_ROWS[normalize_variant(variant)]


def _nonneg(dim: int, start: int = 0) -> List[Tuple[List[Fraction], Fraction]]:
    rows = []
    for t in range(start, dim):
        coeffs = [Fraction(0)] * dim
        coeffs[t] = Fraction(-1)
        rows.append((coeffs, Fraction(0)))
    return rows


def param_region(ch: ChannelMatrix, p: SlsParams, variant: str) -> Polytope:
    """Seven-row region of a variant at fixed parameters (not pruned)."""
    block = _square(ch)
    check_params(block, p, variant)
    rows = _nonneg(3)
    for row in region_rows(variant):
        rows.append(([Fraction(c) for c in row.d_coeffs], row.rhs(block, p)))
    return Polytope.from_rows(3, rows)


def param_region_D(ch: ChannelMatrix, p: SlsParams) -> Polytope:
    return param_region(ch, p, D123)


def param_region_F(ch: ChannelMatrix, p: SlsParams) -> Polytope:
    return param_region(ch, p, F123)


CAP_NAMES = ("d{1}", "d{2}", "d{3}", "d{1,2}", "d{1,2,3}")


def split_caps(ch: ChannelMatrix, p: SlsParams, variant: str) -> Tuple[Fraction, ...]:
    """Rate caps of the layers X1, X2, X3, X12, X123."""
    block = _square(ch)
    lam, lam_p, gamma, gamma_p = p.as_tuple()
    a11, a22, a33 = block.a(1, 1), block.a(2, 2), block.a(3, 3)
    if normalize_variant(variant) == D123:
        c1 = a11 - lam - lam_p - gamma - gamma_p
        c2 = a22 - lam - lam_p
    else:
        c1 = a11 - lam - lam_p - gamma
        c2 = a22 - lam - lam_p - gamma_p
    return (c1, c2, a33 - lam, lam_p, lam)


# full region columns: d1 d2 d3 | s1 s2 s3 s12 s123 | a1 a2 | x1 x2 x3
FULL_COLUMNS = ("d1", "d2", "d3", "s1", "s2", "s3", "s12", "s123", "a1", "a2", "x1", "x2", "x3")
_SPLIT_EQUALITIES = (
    # coefficient map, one per equality "sum == 0"
    {"d1": 1, "s1": -1, "a1": -1, "x1": -1},
    {"d2": 1, "s2": -1, "a2": -1, "x2": -1},
    {"d3": 1, "s3": -1, "x3": -1},
    {"a1": 1, "a2": 1, "s12": -1},
    {"x1": 1, "x2": 1, "x3": 1, "s123": -1},
)
_CAP_COLUMNS = ("s1", "s2", "s3", "s12", "s123")


def _split_system(
    ch: ChannelMatrix, p: SlsParams, variant: str, columns: Sequence[str]
) -> List[Tuple[List[Fraction], Fraction]]:
    index = {name: t for t, name in enumerate(columns)}
    dim = len(columns)
    rows = []
    for eq in _SPLIT_EQUALITIES:
        coeffs = [Fraction(0)] * dim
        rhs = Fraction(0)
        for name, c in eq.items():
            if name in index:
                coeffs[index[name]] += c
        rows.append((coeffs, rhs))
        rows.append(([-c for c in coeffs], -rhs))
    for name, cap in zip(_CAP_COLUMNS, split_caps(ch, p, variant)):
        coeffs = [Fraction(0)] * dim
        coeffs[index[name]] = Fraction(1)
        rows.append((coeffs, cap))
    first_split = next(t for t, name in enumerate(columns) if not name.startswith("d"))
    rows.extend(_nonneg(dim, start=first_split))
    return rows


def full_region(ch: ChannelMatrix, p: SlsParams, variant: str) -> Polytope:
    """
    Region of all (d1, d2, d3) reachable by some rate split, obtained by
    eliminating the ten split columns.
    """
    check_params(_square(ch), p, variant)
    system = Polytope.from_rows(len(FULL_COLUMNS), _split_system(ch, p, variant, FULL_COLUMNS))
    logger.debug("====== full region elimination ======")
    return fm_project(system, keep=[0, 1, 2])


def full_region_D123(ch: ChannelMatrix, p: SlsParams) -> Polytope:
    return full_region(ch, p, D123)


def full_region_F123(ch: ChannelMatrix, p: SlsParams) -> Polytope:
    return full_region(ch, p, F123)


@dataclass(frozen=True)
class RateSplit:
    d_single: Tuple[Fraction, Fraction, Fraction]
    d_pair: Fraction
    d_all: Fraction
    mu: Tuple[Fraction, Fraction] = (Fraction(1), Fraction(0))
    xi: Tuple[Fraction, Fraction, Fraction] = (Fraction(1), Fraction(0), Fraction(0))

    def __post_init__(self) -> None:
        object.__setattr__(self, "d_single", tuple(to_fraction(v) for v in self.d_single))
        object.__setattr__(self, "d_pair", to_fraction(self.d_pair))
        object.__setattr__(self, "d_all", to_fraction(self.d_all))
        object.__setattr__(self, "mu", tuple(to_fraction(v) for v in self.mu))
        object.__setattr__(self, "xi", tuple(to_fraction(v) for v in self.xi))
        if len(self.d_single) != 3 or len(self.mu) != 2 or len(self.xi) != 3:
            logger.error(f"Malformed split: {self}")
            raise ValueError("split needs 3 private rates, 2 pair shares and 3 common shares")

    @classmethod
    def zero(cls) -> "RateSplit":
        return cls((0, 0, 0), 0, 0)

    def induced_rates(self) -> Tuple[Fraction, Fraction, Fraction]:
        pair = (self.mu[0] * self.d_pair, self.mu[1] * self.d_pair, Fraction(0))
        return tuple(
            self.d_single[k] + pair[k] + self.xi[k] * self.d_all for k in range(3)
        )

    def layer_loads(self) -> Dict[str, Fraction]:
        return {
            "X123": self.d_all,
            "X12": self.d_pair,
            "X1": self.d_single[0],
            "X2": self.d_single[1],
            "X3": self.d_single[2],
        }


@dataclass(frozen=True)
class SlsScheme:
    variant: str
    params: SlsParams
    split: RateSplit
    channel: ChannelMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", normalize_variant(self.variant))
        _square(self.channel)


def validate_rate_split(s: SlsScheme) -> Tuple[bool, Tuple[Fraction, Fraction, Fraction]]:
    """Check caps, nonnegativity and share sums; returns the verdict and the induced rates."""
    split = s.split
    induced = split.induced_rates()
    values = list(split.d_single) + [split.d_pair, split.d_all] + list(split.mu) + list(split.xi)
    if any(v < 0 for v in values):
        logger.debug("Split rejected: negative entry.")
        return False, induced
    if sum(split.mu) != 1 or sum(split.xi) != 1:
        logger.debug(f"Split rejected: shares {split.mu = } {split.xi = } do not sum to one.")
        return False, induced
    loads = list(split.d_single) + [split.d_pair, split.d_all]
    for name, load, cap in zip(CAP_NAMES, loads, split_caps(s.channel, s.params, s.variant)):
        if load > cap:
            logger.debug(f"Split rejected: {name} = {load} exceeds cap {cap}.")
            return False, induced
    return True, induced


@dataclass(frozen=True)
class SinrEntry:
    receiver: int
    layer: str
    exponent: Fraction
    load: Fraction
    formula: str

    @property
    def gdof(self) -> Fraction:
        return max(self.exponent, Fraction(0))

    @property
    def ok(self) -> bool:
        return self.load <= self.gdof


@dataclass(frozen=True)
class SinrReport:
    variant: str
    entries: Tuple[SinrEntry, ...]

    @property
    def feasible(self) -> bool:
        return all(e.ok for e in self.entries)

    def entry(self, receiver: int, layer: str) -> SinrEntry:
        return next(e for e in self.entries if e.receiver == receiver and e.layer == layer)

    def render(self) -> List[str]:
        lines = [f"{'rx':>2}  {'layer':<5} {'exponent':>9} {'load':>9}  ok"]
        for e in self.entries:
            lines.append(
                f"{e.receiver:>2}  {e.layer:<5} {format_fraction(e.exponent):>9}"
                f" {format_fraction(e.load):>9}  {'yes' if e.ok else 'NO'}"
            )
        return lines


def symbol_environment(ch: ChannelMatrix, p: SlsParams) -> Dict[str, Fraction]:
    block = _square(ch)
    env = {f"a{k}{m}": block.a(k, m) for k in (1, 2, 3) for m in (1, 2, 3)}
    env.update(zip(sinr_tables.PARAM_SYMBOLS, p.as_tuple()))
    return env


def sinr_exponents(s: SlsScheme) -> SinrReport:
    env = symbol_environment(s.channel, s.params)
    loads = s.split.layer_loads()
    entries = []
    for (receiver, layer), row in sinr_tables.SINR_TABLES[s.variant].items():
        entries.append(
            SinrEntry(receiver, layer, row.evaluate(env), loads[layer], row.render())
        )
    report = SinrReport(s.variant, tuple(entries))
    logger.debug(f"SINR report for {s.variant}: {report.feasible = }")
    return report


# ---------------------------------------------------------------- corner points


@dataclass(frozen=True)
class VertexParams:
    part: str
    variant: str
    order: Tuple[int, int, int]
    params: SlsParams
    source: str
    sigma: Tuple[int, int, int]
    local_channel: ChannelMatrix
    local_point: Tuple[Fraction, Fraction, Fraction]


def _pos(x: Fraction) -> Fraction:
    return max(x, Fraction(0))


def _b_point(a, lam: Fraction, mc: Fraction, aval: Fraction) -> Optional[Tuple[Fraction, ...]]:
    """(gamma, gamma', lambda') of the first matching B sub-case."""
    a12, a13, a21, a23, a31, a32 = a[0][1], a[0][2], a[1][0], a[1][2], a[2][0], a[2][1]
    m2 = max(a23, a32)
    if a13 + a21 == aval:
        return a13 - m2, a31 - m2, a21 - a31
    if a13 + a31 == aval:
        return a13 - m2, a31 - m2, Fraction(0)
    if a12 + a31 == aval:
        return a13 - m2, a31 - m2, a12 - a13
    if mc + lam == aval and mc == a12:
        other = max(a21, a32, a23)
        return a12 - other, Fraction(0), other - lam
    if mc == a13:
        return a13 - m2, Fraction(0), Fraction(0)
    if mc == a21:
        other = max(a12, a23, a32)
        return Fraction(0), a21 - other, other - lam
    if mc == a31:
        return Fraction(0), a31 - m2, Fraction(0)
    if mc == m2:
        return Fraction(0), Fraction(0), Fraction(0)
    return None


def corner_candidates(ch: ChannelMatrix) -> List[Tuple[str, Tuple[Fraction, ...]]]:
    """
    Explicit D-variant parameter choices for the named corner points, as
    (name, (lambda, lambda', gamma, gamma')). Entries that cannot be formed
    are left out; none of them is checked here.
    """
    a = _square(ch).alpha
    a12, a13, a21, a23, a31, a32 = a[0][1], a[0][2], a[1][0], a[1][2], a[2][0], a[2][1]
    mc = max(a12, a13, a21, a23, a31, a32)
    m4 = max(a23, a32, a31, a13)
    m2 = max(a23, a32)
    aval = max(mc + m2, a13 + a21, a12 + a31, a13 + a31)

    found: List[Tuple[str, Tuple[Fraction, ...]]] = []
    point_a = (m4, mc - m4, Fraction(0), Fraction(0))
    found.append(("A", point_a))

    b = _b_point(a, m2, mc, aval)
    if b is not None:
        found.append(("B", (m2, b[2], b[0], b[1])))

    lam = aval - mc
    if mc == a12:
        other = max(a21, a32, a23)
        found.append(("C", (lam, other - lam, a12 - other, Fraction(0))))
    elif mc == a21:
        other = max(a12, a32, a23)
        found.append(("C", (lam, other - lam, Fraction(0), a21 - other)))
    elif mc == a31:
        found.append(("C", (lam, Fraction(0), Fraction(0), a31 - lam)))
    elif mc == a13:
        found.append(("C", (lam, Fraction(0), a13 - lam, Fraction(0))))
    else:
        found.append(("C", (lam, Fraction(0), Fraction(0), Fraction(0))))

    if m4 == a13:
        lam = max(a23, a32, a31)
        found.append(("D", (lam, aval - a13 - lam, a13 - lam, Fraction(0))))
    elif m4 == a31:
        lam = max(a23, a32, a13)
        found.append(("D", (lam, aval - a31 - lam, Fraction(0), a31 - lam)))
    else:
        found.append(("D", (m2, aval - 2 * m2, Fraction(0), Fraction(0))))

    if b is not None:
        found.append(("E", (m2, b[2], b[0], b[1])))

    lam, lam_p = aval - mc, mc - m4
    gamma = max(a13 - lam, a12 - lam - lam_p, Fraction(0))
    found.append(("F", (lam, lam_p, gamma, mc + m4 - aval - gamma)))

    found.append(("origin", point_a))
    return found


def _local_frame(
    ch: ChannelMatrix, v: Sequence[RationalLike], order: Sequence[int]
) -> Tuple[Tuple[int, int, int], ChannelMatrix, Tuple[Fraction, ...]]:
    sigma = [0, 0, 0]
    for slot, user in enumerate(order):
        sigma[user - 1] = slot
    local = _square(ch).relabel_users(sigma)
    point = [Fraction(0)] * 3
    for user in range(3):
        point[sigma[user]] = to_fraction(v[user])
    return tuple(sigma), local, tuple(point)


def _params_lp(
    ch: ChannelMatrix, v: Sequence[Fraction], variant: str
) -> Optional[SlsParams]:
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for t in range(4):
        coeffs = [Fraction(0)] * 4
        coeffs[t] = Fraction(-1)
        rows.append(coeffs)
        rhs.append(Fraction(0))
    for row in param_constraints(variant):
        coeffs = [Fraction(c) for c in row.coeffs]
        a = ch.a(*row.alpha)
        if row.upper:
            rows.append([-c for c in coeffs])
            rhs.append(-a)
        else:
            rows.append(coeffs)
            rhs.append(a)
    zero = SlsParams.zero()
    for row in region_rows(variant):
        load = sum((Fraction(c) * x for c, x in zip(row.d_coeffs, v)), Fraction(0))
        rows.append([Fraction(c) for c in row.param_coeffs])
        rhs.append(row.rhs(ch, zero) - load)

    axes = [[Fraction(int(s == t)) for s in range(4)] for t in range(4)]
    result = lexicographic_minimize(axes, rows, rhs)
    if not result.is_optimal:
        logger.debug(f"Parameter LP for {variant} at {tuple(v)} is {result.status}.")
        return None
    return SlsParams.from_sequence(result.point)


def params_for_vertex(
    ch: ChannelMatrix, v: Sequence[RationalLike], part: Optional[str] = None
) -> Optional[VertexParams]:
    """
    Parameters whose region contains ``v``.

    ``part`` is a label such as "D213"; by default the part predicted for
    the channel is used. The D variant tries the corner-point table first,
    the F variant and every table miss go through the exact LP.
    """
    if any(to_fraction(x) < 0 for x in v):
        logger.debug(f"{tuple(v)} has a negative coordinate; no parameters.")
        return None
    labeled = ch
    conditions = check_sls_conditions(ch)
    if conditions.satisfied and not conditions.identity_labeling:
        labeled = ch.relabel_antennas(conditions.witness_permutation)
    if part is None:
        if not conditions.satisfied:
            logger.warning("Conditions fail and no part was given; trying D123.")
            part = "D123"
        else:
            part, _ = predict_matching_part(labeled)
    kind, order = parse_part_label(part)
    variant = normalize_variant(kind)
    sigma, local, point = _local_frame(labeled, v, order)

    def build(params: SlsParams, source: str) -> VertexParams:
        return VertexParams(part, variant, order, params, source, sigma, local, point)

    if variant == D123:
        tried = set()
        for name, values in corner_candidates(local):
            if values in tried or any(x < 0 for x in values):
                continue
            tried.add(values)
            params = SlsParams.from_sequence(values)
            if violated_constraints(local, params, D123):
                continue
            if contains_point(param_region(local, params, D123), point):
                logger.debug(f"{part} point {point} taken from table entry {name}.")
                return build(params, f"table:{name}")
        logger.warning(f"table-miss: no corner entry of {part} covers {point}; using the LP.")

    params = _params_lp(local, point, variant)
    if params is None:
        logger.info(f"No {variant} parameters reach {point}.")
        return None
    return build(params, "lp")


def rate_split_for_point(
    ch: ChannelMatrix, variant: str, params: SlsParams, d: Sequence[RationalLike]
) -> Optional[RateSplit]:
    """Exact LP for a split whose induced rates equal ``d``."""
    d = [to_fraction(x) for x in d]
    columns = FULL_COLUMNS[3:]
    rows = _split_system(ch, params, variant, FULL_COLUMNS)
    # fix d1..d3 by moving them to the rhs
    fixed = []
    for coeffs, rhs in rows:
        shift = sum((c * x for c, x in zip(coeffs[:3], d)), Fraction(0))
        fixed.append((coeffs[3:], rhs - shift))
    x = find_feasible_point([c for c, _ in fixed], [r for _, r in fixed], len(columns))
    if x is None:
        logger.debug(f"No {variant} split reaches {tuple(d)}.")
        return None
    val = dict(zip(columns, x))
    s12, s123 = val["s12"], val["s123"]
    mu = (val["a1"] / s12, val["a2"] / s12) if s12 else (Fraction(1), Fraction(0))
    xi = (
        (val["x1"] / s123, val["x2"] / s123, val["x3"] / s123)
        if s123
        else (Fraction(1), Fraction(0), Fraction(0))
    )
    return RateSplit((val["s1"], val["s2"], val["s3"]), s12, s123, mu, xi)


@dataclass(frozen=True)
class PointCertificate:
    point: Tuple[Fraction, ...]
    vertex_params: Optional[VertexParams]
    split: Optional[RateSplit]
    split_valid: bool
    induced: Optional[Tuple[Fraction, ...]]
    report: Optional[SinrReport]

    @property
    def certified(self) -> bool:
        return (
            self.vertex_params is not None
            and self.split_valid
            and self.induced == self.vertex_params.local_point
            and self.report is not None
            and self.report.feasible
        )


def certify_point(
    ch: ChannelMatrix, v: Sequence[RationalLike], part: Optional[str] = None
) -> PointCertificate:
    point = tuple(to_fraction(x) for x in v)
    vp = params_for_vertex(ch, point, part)
    if vp is None:
        return PointCertificate(point, None, None, False, None, None)
    split = rate_split_for_point(vp.local_channel, vp.variant, vp.params, vp.local_point)
    if split is None:
        return PointCertificate(point, vp, None, False, None, None)
    scheme = SlsScheme(vp.variant, vp.params, split, vp.local_channel)
    valid, induced = validate_rate_split(scheme)
    report = sinr_exponents(scheme)
    cert = PointCertificate(point, vp, split, valid, induced, report)
    logger.debug(f"Certificate for {point}: {cert.certified = } via {vp.source}")
    return cert


def random_feasible_params(
    ch: ChannelMatrix,
    variant: str,
    rng: np.random.Generator,
    denominator: int = 16,
    tries: int = 200,
) -> Optional[SlsParams]:
    """Rejection-sample parameters on the 1/denominator grid that satisfy every constraint."""
    variant = normalize_variant(variant)
    a = _square(ch).alpha
    a11, a12, a13 = a[0]
    a21, a22, a23 = a[1]
    a31, a32, a33 = a[2]
    lo = max(a23, a32) if variant == D123 else max(a23, a31)
    hi = min(a11, a22, a33)
    lo_i, hi_i = math.ceil(lo * denominator), math.floor(hi * denominator)
    if lo_i > hi_i:
        logger.debug(f"No grid value for lambda in [{lo}, {hi}].")
        return None

    def extra() -> Fraction:
        return Fraction(int(rng.integers(0, 3)), denominator)

    for _ in range(tries):
        lam = Fraction(int(rng.integers(lo_i, hi_i + 1)), denominator)
        if variant == D123:
            gamma = _pos(a13 - lam) + extra()
            gamma_p = _pos(a31 - lam) + extra()
            lam_p = max(a12 - lam - gamma, a21 - lam - gamma_p, Fraction(0)) + extra()
        else:
            gamma = _pos(a13 - lam) + extra()
            lam_p = _pos(a21 - lam) + extra()
            gamma_p = max(a32 - lam, a12 - lam - lam_p - gamma, Fraction(0)) + extra()
        params = SlsParams(lam, lam_p, gamma, gamma_p)
        if not violated_constraints(ch, params, variant):
            return params
    logger.debug(f"No feasible {variant} parameters after {tries} draws.")
    return None
