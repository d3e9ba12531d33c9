"""
Exact two-phase simplex over Fractions.

Solves ``maximize c.x subject to A x <= b`` with every x free. Free
variables are split into positive and negative parts, phase one drives a
single artificial column out of the basis, and Bland's rule is used in
both phases so degenerate pivots cannot cycle.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Optional[Fraction] = None
    point: Optional[tuple] = None

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


class SimplexTableau:
    """
    Dictionary tableau: ``basic_i = b_i - sum_j A_ij * nonbasic_j`` and
    ``z = value + sum_j c_j * nonbasic_j``.

    Variables are identified by integer labels; the smallest label wins
    every tie, which is all Bland's rule needs.
    """

    def __init__(
        self,
        A: List[List[Fraction]],
        b: List[Fraction],
        c: List[Fraction],
        nb_vars: List[int],
        b_vars: List[int],
    ) -> None:
        self.A = A
        self.b = b
        self.c = c
        self.m = len(b)
        self.n = len(c)
        self.nb_vars = nb_vars
        self.b_vars = b_vars
        self.value = Fraction(0)
        self.pivots = 0

    def pivot(self, i: int, j: int) -> None:
        A, b, c = self.A, self.b, self.c
        inv = 1 / A[i][j]
        new_row = [a * inv for a in A[i]]
        new_row[j] = inv
        new_b = b[i] * inv
        A[i] = new_row
        b[i] = new_b
        nonzero = [l for l in range(self.n) if l != j and new_row[l]]

        for k in range(self.m):
            if k == i:
                continue
            f = A[k][j]
            if not f:
                continue
            row = A[k]
            for l in nonzero:
                row[l] -= f * new_row[l]
            row[j] = -f * inv
            b[k] -= f * new_b

        f = c[j]
        if f:
            self.value += f * new_b
            for l in nonzero:
                c[l] -= f * new_row[l]
            c[j] = -f * inv

        self.nb_vars[j], self.b_vars[i] = self.b_vars[i], self.nb_vars[j]
        self.pivots += 1

    def bland_step(self) -> str:
        entering = [(self.nb_vars[j], j) for j in range(self.n) if self.c[j] > 0]
        if not entering:
            return OPTIMAL
        _, j = min(entering)

        leaving = [
            (self.b[i] / self.A[i][j], self.b_vars[i], i)
            for i in range(self.m)
            if self.A[i][j] > 0
        ]
        if not leaving:
            return UNBOUNDED
        _, _, i = min(leaving)
        self.pivot(i, j)
        return "go_on"

    def bland_primal(self) -> str:
        while True:
            status = self.bland_step()
            if status != "go_on":
                return status

    def drop_column(self, j: int) -> None:
        for row in self.A:
            del row[j]
        del self.c[j]
        del self.nb_vars[j]
        self.n -= 1

    def drop_row(self, i: int) -> None:
        del self.A[i]
        del self.b[i]
        del self.b_vars[i]
        self.m -= 1


def maximize(
    objective: Sequence[Fraction],
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
) -> LPResult:
    """
    Maximize ``objective . x`` over ``{x : rows @ x <= rhs}``.

    Returns an LPResult whose status is "optimal", "unbounded" or
    "infeasible"; value and point are only set when optimal.
    """
    n = len(objective)
    m = len(rows)
    art = 2 * n

    # columns: y+ (0..n-1), y- (n..2n-1), artificial (2n); slacks are 2n+1..
    A = [
        [Fraction(a) for a in row] + [-Fraction(a) for a in row] + [Fraction(-1)]
        for row in rows
    ]
    b = [Fraction(r) for r in rhs]
    c = [Fraction(0)] * (2 * n) + [Fraction(-1)]
    tab = SimplexTableau(
        A, b, c, nb_vars=list(range(2 * n + 1)), b_vars=list(range(art + 1, art + 1 + m))
    )

    if m and min(b) < 0:
        _, i = min((b[i], i) for i in range(m))
        tab.pivot(i, art)
        status = tab.bland_primal()
        if status != OPTIMAL or tab.value < 0:
            logger.debug(f"Phase one ended with {tab.value = }: infeasible.")
            return LPResult(status=INFEASIBLE)

    if art in tab.b_vars:
        i = tab.b_vars.index(art)
        j = next((j for j in range(tab.n) if tab.A[i][j]), None)
        if j is None:
            tab.drop_row(i)
        else:
            tab.pivot(i, j)
    tab.drop_column(tab.nb_vars.index(art))

    weights = [Fraction(v) for v in objective] + [-Fraction(v) for v in objective]
    tab.c = [Fraction(0)] * tab.n
    tab.value = Fraction(0)
    for label, w in enumerate(weights):
        if not w:
            continue
        if label in tab.b_vars:
            i = tab.b_vars.index(label)
            tab.value += w * tab.b[i]
            for l in range(tab.n):
                if tab.A[i][l]:
                    tab.c[l] -= w * tab.A[i][l]
        else:
            tab.c[tab.nb_vars.index(label)] += w

    status = tab.bland_primal()
    if status == UNBOUNDED:
        return LPResult(status=UNBOUNDED)

    values = [Fraction(0)] * (2 * n)
    for i, label in enumerate(tab.b_vars):
        if label < 2 * n:
            values[label] = tab.b[i]
    point = tuple(values[t] - values[n + t] for t in range(n))
    return LPResult(status=OPTIMAL, value=tab.value, point=point)


def find_feasible_point(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], dim: int
) -> Optional[tuple]:
    result = maximize([Fraction(0)] * dim, rows, rhs)
    return result.point if result.is_optimal else None


def lexicographic_minimize(
    objectives: Sequence[Sequence[Fraction]],
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
) -> LPResult:
    """
    Minimize each objective in turn, pinning every optimum before the next.

    The returned point is the unique lexicographic minimum when the
    objectives are the coordinate axes.
    """
    rows = [list(r) for r in rows]
    rhs = list(rhs)
    result = LPResult(status=INFEASIBLE)
    for objective in objectives:
        negated = [-Fraction(v) for v in objective]
        result = maximize(negated, rows, rhs)
        if not result.is_optimal:
            return result
        rows.append([Fraction(v) for v in objective])
        rhs.append(-result.value)
    return result
