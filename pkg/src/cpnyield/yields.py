"""Maximum token mass on a goal place by bisection over at-least reachability."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from . import lp
from .firing import max_fs
from .net import INF, Cpn, ExtendedRational, Marking, Parikh, as_fraction
from .reach import ReachMode, at_least_reachable

DEFAULT_EPSILON = Fraction(1, 1000)


@dataclass
class YieldResult:
    """Best certified mass on the goal place.

    ``value`` is ``None`` when the yield is unbounded. ``status`` is one of
    ``optimal``, ``unbounded``, ``exhausted`` (MILP exclusion budget spent) or
    ``infeasible``.
    """

    goal: str
    value: Optional[Fraction]
    parikh: Optional[Parikh]
    support: frozenset[str]
    method: str
    status: str = "optimal"
    queries: int = 0
    cuts: int = 0
    # False when the MILP optimum is a supremum that no firing-set member attains
    # exactly (the returned support is fireable but the vertex uses a subset).
    attained: bool = True
    upper_bound: ExtendedRational = INF
    excluded: list[frozenset[str]] = field(default_factory=list)
    alr_seconds: float = 0.0
    iterations: list[int] = field(default_factory=list)

    @property
    def bound_status(self) -> str:
        return "unbounded" if self.status == "unbounded" else "finite"


def _bound(net: Cpn, m0: Marking, g: int, columns: Iterable[int]) -> ExtendedRational:
    cols = list(columns)
    if not cols:
        return m0.values[g]
    C = net.incidence
    prog = lp.LinearProgram(
        len(cols),
        [({k: C[p][j] for k, j in enumerate(cols) if C[p][j]}, lp.Relation.GE, -m0.values[p]) for p in range(len(net.places))],
        objective={k: C[g][j] for k, j in enumerate(cols) if C[g][j]},
        sense=lp.Sense.MAXIMIZE,
    )
    out = lp.solve(prog)
    if out.status is lp.Status.UNBOUNDED:
        return INF
    return m0.values[g] + out.value


def yield_upper_bound(net: Cpn, m0: Marking, goal_place: str) -> ExtendedRational:
    """``m0(goal) + max (C v)[goal]`` over ``v >= 0, m0 + C v >= 0``; ``INF`` if unbounded.

    Ignores causality, so this over-approximates the achievable yield.
    """
    net.check_marking(m0)
    return _bound(net, m0, net.pidx(goal_place), range(len(net.transitions)))


def fireable_upper_bound(net: Cpn, m0: Marking, goal_place: str) -> ExtendedRational:
    """Like :func:`yield_upper_bound` but over the maximal firing set only.

    No firing sequence can use a transition outside it, so this is still a
    valid bound, and in limit mode it is exactly the supremum of the yield.
    """
    net.check_marking(m0)
    cols = sorted(net.tidx(t) for t in max_fs(net, m0))
    return _bound(net, m0, net.pidx(goal_place), cols)


def max_yield_binsearch(
    net: Cpn,
    m0: Marking,
    goal_place: str,
    epsilon: Fraction | int | str = DEFAULT_EPSILON,
    mode: ReachMode | str = ReachMode.LIMIT,
) -> YieldResult:
    """Bisect the goal mass between ``m0(goal)`` and the LP bound.

    The bracket top is :func:`yield_upper_bound`. When that LP is unbounded
    only through transitions that can never fire, the bound over the maximal
    firing set is used instead, so ``unbounded`` is reported only when the
    yield really is unbounded. The bracket top is tried first and returned
    exactly when reachable.
    Otherwise the search stops once the bracket is at most ``epsilon`` wide and
    returns the highest mass confirmed reachable, with its Parikh certificate.
    """
    epsilon = as_fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    mode = ReachMode(mode)
    g = net.pidx(goal_place)
    start = m0.values[g]
    top = yield_upper_bound(net, m0, goal_place)
    if top == INF:
        top = fireable_upper_bound(net, m0, goal_place)
    zero = net.parikh()
    res = YieldResult(goal_place, start, zero, frozenset(), "binsearch", upper_bound=top)
    if top == INF:
        res.value, res.parikh, res.status = None, None, "unbounded"
        return res
    if top <= start:
        return res

    def probe(x: Fraction):
        goal = [Fraction(0)] * len(net.places)
        goal[g] = x
        t0 = time.perf_counter()
        r = at_least_reachable(net, m0, Marking(net.places, tuple(goal)), mode)
        res.alr_seconds += time.perf_counter() - t0
        res.queries += 1
        res.iterations.append(r.iterations)
        return r

    r = probe(top)
    if r.reachable:
        res.value, res.parikh, res.support = top, r.parikh, r.support
        return res
    lo, hi = start, top
    while hi - lo > epsilon:
        mid = (lo + hi) / 2
        r = probe(mid)
        if r.reachable:
            lo = mid
            res.parikh, res.support = r.parikh, r.support
        else:
            hi = mid
    res.value = lo
    return res


def query_budget(start: Fraction, top: Fraction, epsilon: Fraction) -> int:
    """Upper limit on probes for a bracket ``[start, top]``."""
    span = (top - start) / epsilon
    return (math.ceil(math.log2(span)) if span > 1 else 0) + 2
