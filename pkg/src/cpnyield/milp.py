"""Yield maximization by mixed-integer programming with firing-set exclusion cuts.

Each transition gets a flow variable ``v_t >= 0`` and an indicator ``b_t`` in
{0, 1} linked by ``v_t <= U_t * b_t``. A solution whose indicator pattern is
not in the firing set is cut off exactly by

    sum(b_t, t in S) - sum(b_t, t not in S) <= |S| - 1

and the program is solved again.
"""

from __future__ import annotations

import copy
import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from gmpy2 import mpq

from . import lp
from .firing import fireable_indices, max_fs
from .net import INF, Cpn, Marking, Parikh, marking_after, reverse
from .yields import YieldResult, fireable_upper_bound, yield_upper_bound

log = logging.getLogger(__name__)

DEFAULT_CAP = 400


@dataclass
class MilpProblem:
    lp: lp.LinearProgram
    integral: frozenset[int]

    def __post_init__(self):
        self.integral = frozenset(self.integral)
        if any(not 0 <= j < self.lp.num_vars for j in self.integral):
            raise lp.LpError("integral index out of range")


@dataclass(frozen=True)
class ExclusionCut:
    excluded_support: frozenset[str]

    def row(self, indicator: dict[str, int]) -> tuple[dict[int, int], int]:
        """Coefficients over indicator variables and the right-hand side."""
        coefs = {col: (1 if t in self.excluded_support else -1) for t, col in indicator.items()}
        return coefs, len(self.excluded_support) - 1

    def violated_by(self, support: Iterable[str]) -> bool:
        return frozenset(support) == self.excluded_support


def _is_int(x: Fraction) -> bool:
    return x.denominator == 1


def solve_milp(p: MilpProblem) -> lp.LpOutcome:
    """Exact depth-first branch and bound over the binary variables of ``p``.

    Each node solves its LP relaxation; fractional binaries are branched on
    (nearest rounding first) and nodes whose bound cannot beat the incumbent
    are pruned. Rounded relaxation points are tried as cheap incumbents.
    """
    base = p.lp
    sign = {lp.Sense.MAXIMIZE: 1, lp.Sense.MINIMIZE: -1, lp.Sense.FEASIBILITY: 0}[base.sense]
    obj = dict(lp._items(base.objective)) if (sign and base.objective is not None) else {}
    obj = {j: Fraction(c) for j, c in obj.items() if c}
    # Objective is integral on integral points: bounds may be rounded.
    integer_obj = all(j in p.integral and _is_int(c) for j, c in obj.items())

    lower = list(base.lower)
    upper = list(base.upper)
    for j in p.integral:
        lower[j] = max(Fraction(0), Fraction(lower[j])) if lower[j] is not None else Fraction(0)
        upper[j] = min(Fraction(1), Fraction(upper[j])) if upper[j] is not None else Fraction(1)
        if lower[j] > upper[j]:
            return lp.LpOutcome(lp.Status.INFEASIBLE)

    def objective(x) -> Fraction:
        return sign * sum((c * x[j] for j, c in obj.items()), Fraction(0))

    best: Optional[Fraction] = None
    best_x = None
    nodes = 0
    stack: list[dict[int, int]] = [{}]
    order = sorted(p.integral)
    while stack:
        fix = stack.pop()
        nodes += 1
        node = copy.copy(base)
        node.lower = list(lower)
        node.upper = list(upper)
        for j, val in fix.items():
            node.lower[j] = node.upper[j] = val
        out = lp.solve(node)
        if out.status is lp.Status.INFEASIBLE:
            continue
        x = out.point
        frac = [j for j in order if not _is_int(x[j])]
        if out.status is lp.Status.UNBOUNDED:
            if not frac:
                return lp.LpOutcome(lp.Status.UNBOUNDED, x, None, out.ray, nodes)
            bound = None
        else:
            bound = objective(x)
            if integer_obj:
                bound = Fraction(math.floor(bound))
            if best is not None and bound <= best:
                continue
            if not frac:
                best, best_x = objective(x), x
                continue
            for rnd in (math.ceil, math.floor, round):
                y = list(x)
                for j in frac:
                    y[j] = Fraction(rnd(x[j]))
                if lp.satisfies(base, y) and all(lower[j] <= y[j] <= upper[j] for j in order):
                    val = objective(y)
                    if best is None or val > best:
                        best, best_x = val, tuple(y)
            if best is not None and best >= bound:
                continue
        j = min(frac, key=lambda k: (abs(x[k] - Fraction(1, 2)), k))
        near = 1 if x[j] >= Fraction(1, 2) else 0
        stack.append({**fix, j: 1 - near})
        stack.append({**fix, j: near})
    if best_x is None:
        return lp.LpOutcome(lp.Status.INFEASIBLE, nodes=nodes)
    return lp.LpOutcome(lp.Status.OPTIMAL, tuple(best_x), best * sign if sign else Fraction(0), nodes=nodes)


def min_support(n: int, rows, U: Sequence[Fraction]) -> lp.LpOutcome:
    """Fewest nonzero flows ``v`` with ``v <= U`` subject to ``rows`` (over ``v`` only).

    Same optimum as the indicator model ``min sum(b), v <= U b`` without exclusion
    rows, but each relaxation is solved over the flows alone: a free indicator
    settles at ``v / U``, so the objective becomes ``sum(v / U)`` over unfixed
    flows. The point is returned in the ``(v, b)`` layout of the full model.
    """
    best: Optional[int] = None
    best_v = None
    nodes = 0
    stack: list[dict[int, int]] = [{}]
    while stack:
        fix = stack.pop()
        nodes += 1
        upper = [Fraction(0) if fix.get(k) == 0 else U[k] for k in range(n)]
        ones = sum(1 for k in fix.values() if k)
        objective = {k: 1 / U[k] for k in range(n) if k not in fix}
        out = lp.solve(lp.LinearProgram(n, list(rows), upper=upper, objective=objective, sense=lp.Sense.MINIMIZE))
        if not out.optimal:
            continue
        bound = math.ceil(out.value) + ones
        if best is not None and bound >= best:
            continue
        v = out.point
        size = sum(1 for x in v if x)
        if best is None or size < best:
            best, best_v = size, v
        if size <= bound:
            continue
        frac = [k for k in range(n) if k not in fix and 0 < v[k] < U[k]]
        if not frac:
            continue
        k = min(frac, key=lambda j: (abs(v[j] / U[j] - Fraction(1, 2)), j))
        near = 1 if v[k] * 2 >= U[k] else 0
        stack.append({**fix, k: 1 - near})
        stack.append({**fix, k: near})
    if best_v is None:
        return lp.LpOutcome(lp.Status.INFEASIBLE, nodes=nodes)
    point = tuple(best_v) + tuple(Fraction(1 if x else 0) for x in best_v)
    return lp.LpOutcome(lp.Status.OPTIMAL, point, Fraction(best), nodes=nodes)


class Strategy(str, enum.Enum):
    LEXICOGRAPHIC = "lexicographic"
    BIG_M = "big-m"


def flow_bounds(
    net: Cpn,
    m0: Marking,
    columns: Sequence[int],
    ceiling: Optional[Fraction] = None,
    goal_rhs: Fraction = Fraction(0),
    goal: Optional[int] = None,
) -> dict[int, Fraction]:
    """Upper bounds on each ``v_t`` over ``{v >= 0, m0 + C v >= 0}`` (only ``columns`` may be nonzero).

    Propagation through consuming arcs first, which finds the flows forced to
    zero; then an LP per remaining transition, since propagated bounds add up
    the same mass along every path; and a determinant (Hadamard) bound on vertex
    coordinates for flows the LP finds unbounded, unless ``ceiling`` is given.
    """
    C = net.incidence
    cols = list(columns)
    U: dict[int, float | Fraction] = {j: INF for j in cols}
    producers = [[j for j in cols if net.post[p][j]] for p in range(len(net.places))]
    for _ in range(len(cols) + 1):
        changed = False
        for j in cols:
            best = U[j]
            for p in net.inputs[j]:
                if C[p][j] >= 0:
                    continue
                total = m0.values[p]
                for k in producers[p]:
                    if k != j:
                        total = total + net.post[p][k] * U[k]
                if total < best * -C[p][j]:
                    best = total / -C[p][j]
            if best < U[j]:
                U[j] = best
                changed = True
        if not changed:
            break
    open_ = [j for j in cols if U[j] > 0]
    if open_:
        pos = {j: k for k, j in enumerate(cols)}
        rows = []
        rhs = []
        for p in range(len(net.places)):
            row = {pos[j]: mpq(C[p][j]) for j in cols if C[p][j]}
            if row:
                rows.append(row)
                rhs.append(-lp._q(m0.values[p]))
        tab = lp.Tableau(rows, [lp.Relation.GE] * len(rows), rhs, len(cols))
        unbounded = []
        for j in open_:
            status, _, value, _ = tab.maximize({pos[j]: mpq(1)})
            if status is lp.Status.OPTIMAL:
                U[j] = min(U[j], lp.to_fraction(value))
            else:
                unbounded.append(j)
        if unbounded:
            cap = ceiling if ceiling is not None else vertex_bound(net, m0, cols, goal_rhs, goal)
            log.info(
                "flow through %s is unbounded; using ceiling %s",
                ", ".join(net.transitions[j] for j in unbounded),
                cap,
            )
            for j in unbounded:
                U[j] = cap
    return {j: Fraction(U[j]) for j in cols}


def vertex_bound(
    net: Cpn, m0: Marking, cols: Sequence[int], extra_rhs: Fraction = Fraction(0), goal: Optional[int] = None
) -> Fraction:
    """Bound on every coordinate of every basic solution of ``C v >= -m0`` plus a goal row.

    By Cramer's rule a coordinate is ``det(A_i) / det(A)`` with ``|det(A)| >= 1``
    for the integral basis ``A``; Hadamard's inequality bounds ``det(A_i)`` by
    the right-hand side norm times the norms of at most ``rows - 1`` other
    basis columns. Slack columns have norm 1, so the largest structural
    column norms give the bound.
    """
    rhs2 = sum((x * x for x in m0.values), Fraction(0)) + extra_rhs * extra_rhs
    C = net.incidence
    rows = len(net.places) + (goal is not None)

    def norm(j: int) -> int:
        sq = sum(C[p][j] * C[p][j] for p in range(len(net.places)))
        if goal is not None:
            sq += C[goal][j] * C[goal][j]
        return _ceil_sqrt(Fraction(sq))

    norms = sorted((norm(j) for j in cols), reverse=True)
    bound = Fraction(_ceil_sqrt(rhs2))
    for n in norms[: rows - 1]:
        bound *= max(1, n)
    return max(bound, Fraction(1))


def _ceil_sqrt(x: Fraction) -> int:
    # ceil(sqrt(x)) for x >= 0, exact
    n = math.ceil(x)
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def relevant_transitions(net: Cpn, goal: int, columns: Sequence[int]) -> list[int]:
    """Transitions of ``columns`` with a directed path to the goal place.

    Zeroing the flow of every other transition keeps the final marking
    nonnegative, does not lower the goal mass and keeps the support fireable,
    so they can be left out of the program.
    """
    cols = set(columns)
    wanted = {goal}
    keep: set[int] = set()
    frontier = [goal]
    while frontier:
        p = frontier.pop()
        for j in cols - keep:
            if net.post[p][j]:
                keep.add(j)
                for q in net.inputs[j]:
                    if q not in wanted:
                        wanted.add(q)
                        frontier.append(q)
    return sorted(keep)


class _Search:
    """State of one exclusion loop; reused across n-best enumeration."""

    def __init__(self, net: Cpn, m0: Marking, goal_place: str, strategy: Strategy, c: Optional[Fraction],
                 strict_finite: bool, ceiling: Optional[Fraction]):
        self.net, self.m0 = net, m0
        self.g = net.pidx(goal_place)
        self.goal = goal_place
        self.strategy = strategy
        self.strict_finite = strict_finite
        self.cuts: list[frozenset[str]] = []
        self.returned: list[frozenset[str]] = []
        self.upper = yield_upper_bound(net, m0, goal_place)
        self.unbounded = False
        self.ceiling, self.c = ceiling, c
        self.nodes = 0
        self.solves = 0
        self.ready = False
        self._cols = list(range(len(net.transitions)))
        if self.upper == INF:
            # Causally impossible transitions could carry an unbounded flow;
            # none of them is ever in a firing set, so drop them up front.
            self.upper = fireable_upper_bound(net, m0, goal_place)
            if self.upper == INF:
                self.unbounded = True
                return
            self._cols = sorted(net.tidx(t) for t in max_fs(net, m0))
            log.info("yield LP unbounded on the full net; restricting to the maximal firing set")

    def _setup(self):
        net, m0, c = self.net, self.m0, self.c
        cols = relevant_transitions(net, self.g, self._cols)
        U = flow_bounds(net, m0, cols, self.ceiling, self.upper, self.g)
        self.cols = [j for j in cols if U[j] > 0]
        self.U = [U[j] for j in self.cols]
        na = len(self.cols)
        self.na = na
        C = net.incidence
        self.gain = {k: C[self.g][j] for k, j in enumerate(self.cols) if C[self.g][j]}
        cons = []
        for p in range(len(net.places)):
            row = {k: C[p][j] for k, j in enumerate(self.cols) if C[p][j]}
            if row:
                cons.append((row, lp.Relation.GE, -m0.values[p]))
        for k in range(na):
            cons.append(({k: 1, na + k: -self.U[k]}, lp.Relation.LE, 0))
        self.base = cons
        self.indicator = {net.transitions[j]: na + k for k, j in enumerate(self.cols)}
        if c is None:
            c = len(net.transitions) * (self.upper + 1)
        self.c = Fraction(c)
        self.ready = True

    def _rows(self):
        rows = list(self.base)
        for S in self.cuts + self.returned:
            if S <= self.indicator.keys():
                coefs, rhs = ExclusionCut(S).row(self.indicator)
                rows.append((coefs, lp.Relation.LE, rhs))
        return rows

    def _solve(self, rows, objective, sense) -> lp.LpOutcome:
        prog = lp.LinearProgram(2 * self.na, rows, objective=objective, sense=sense)
        out = solve_milp(MilpProblem(prog, range(self.na, 2 * self.na)))
        self.nodes += out.nodes
        self.solves += 1
        return out

    def _stage_two(self, rows, target: Fraction) -> lp.LpOutcome:
        rows = rows + [(self.gain, lp.Relation.GE, target - self.m0.values[self.g])]
        if len(rows) == len(self.base) + 1:
            out = min_support(self.na, [(r, rel, b) for r, rel, b in rows if all(k < self.na for k in r)], self.U)
            self.nodes += out.nodes
            self.solves += 1
            return out
        return self._solve(rows, {self.na + k: 1 for k in range(self.na)}, lp.Sense.MINIMIZE)

    def run(self, cap: int) -> YieldResult:
        res = YieldResult(self.goal, None, None, frozenset(), "milp", upper_bound=self.upper)
        if self.unbounded:
            res.status = "unbounded"
            return res
        if not self.returned and self.upper <= self.m0.values[self.g]:
            # Nothing can raise the goal, and the empty pattern is always fireable.
            res.value, res.parikh, res.attained = self.m0.values[self.g], self.net.parikh(), True
            self.returned.append(frozenset())
            return self._finish(res, "optimal")
        if not self.ready:
            self._setup()
        # The LP bound is the best any pattern can do; try it before solving stage one.
        previous: Optional[Fraction] = self.upper
        while True:
            rows = self._rows()
            if self.strategy is Strategy.LEXICOGRAPHIC:
                out = self._stage_two(rows, previous) if previous is not None else None
                if out is None or not out.optimal:
                    first = self._solve(rows, self.gain, lp.Sense.MAXIMIZE)
                    if not first.optimal:
                        return self._finish(res, "infeasible")
                    previous = self.m0.values[self.g] + first.value
                    out = self._stage_two(rows, previous)
                    assert out.optimal
            else:
                objective = {k: self.c * a for k, a in self.gain.items()}
                objective.update({self.na + k: -1 for k in range(self.na)})
                out = self._solve(rows, objective, lp.Sense.MAXIMIZE)
                if not out.optimal:
                    return self._finish(res, "infeasible")
            x = out.point
            flow = [Fraction(0)] * len(self.net.transitions)
            pattern = []
            for k, j in enumerate(self.cols):
                flow[j] = x[k]
                if x[self.na + k] == 1:
                    pattern.append(j)
                else:
                    assert x[k] == 0
            S = frozenset(self.net.transitions[j] for j in pattern)
            ok = fireable_indices(self.net, self.m0.values, pattern)[0]
            if ok and self.strict_finite:
                reached = marking_after(self.net, self.m0, flow)
                ok = fireable_indices(reverse(self.net), reached, pattern)[0]
            res.queries = self.solves
            if ok:
                v = Parikh(self.net.transitions, tuple(flow))
                res.value = self.m0.values[self.g] + sum((a * x[k] for k, a in self.gain.items()), Fraction(0))
                res.parikh, res.support = v, S
                res.attained = v.support() == S
                self.returned.append(S)
                return self._finish(res, "optimal")
            self.cuts.append(S)
            res.excluded.append(S)
            if len(res.excluded) >= cap:
                return self._finish(res, "exhausted")

    def _finish(self, res: YieldResult, status: str) -> YieldResult:
        res.status = status
        res.cuts = len(res.excluded)
        res.queries = self.solves
        return res


def milp_max(
    net: Cpn,
    m0: Marking,
    goal_place: str,
    cap: int = DEFAULT_CAP,
    strategy: Strategy | str = Strategy.LEXICOGRAPHIC,
    c: Optional[Fraction] = None,
    strict_finite: bool = False,
    ceiling: Optional[Fraction] = None,
) -> YieldResult:
    """Maximize the goal mass over firing-set members, preferring small supports.

    ``lexicographic`` first maximizes the yield and then minimizes the number
    of used transitions at that yield; ``big-m`` maximizes
    ``c * yield - |support|`` in one program. Stops after ``cap`` exclusion cuts
    with status ``exhausted``. Only forward fireability is checked unless
    ``strict_finite`` also asks for the reverse-net check, so by default the
    yield is limit-reachable.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    net.check_marking(m0)
    return _Search(net, m0, goal_place, Strategy(strategy), c, strict_finite, ceiling).run(cap)


def enumerate_solutions(
    net: Cpn,
    m0: Marking,
    goal_place: str,
    n: int,
    cap: int = DEFAULT_CAP,
    strategy: Strategy | str = Strategy.LEXICOGRAPHIC,
    strict_finite: bool = False,
) -> list[YieldResult]:
    """Up to ``n`` solutions with pairwise different supports, best first.

    Every returned support is excluded before the next solve, in addition to
    the supports cut for not being fireable. ``cap`` bounds the latter across
    the whole enumeration.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    net.check_marking(m0)
    search = _Search(net, m0, goal_place, Strategy(strategy), None, strict_finite, None)
    out: list[YieldResult] = []
    budget = cap
    while len(out) < n and budget > 0:
        r = search.run(budget)
        budget -= r.cuts
        if r.status != "optimal":
            if r.status == "unbounded" and not out:
                out.append(r)
            break
        out.append(r)
    return out
