"""Reachability and at-least reachability decisions.

Both procedures shrink a candidate transition set ``T'`` until the support of
an aggregated LP solution agrees with the forward firing set of the restricted
net (and, for finite reachability, with the firing set of its reverse from the
reached marking).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import lp
from .firing import fireable_indices
from .net import Cpn, Marking, Parikh, marking_after, reverse


class ReachMode(str, enum.Enum):
    FINITE = "finite"
    LIMIT = "limit"


class ReverseFrom(str, enum.Enum):
    """Marking the reverse-net firing-set check starts from in finite mode."""

    TARGET = "target"  # the marking being reached (default)
    INITIAL = "initial"  # m0, as the printed pseudo-code literally reads


@dataclass
class ReachResult:
    reachable: bool
    parikh: Optional[Parikh]
    support: frozenset[str]
    iterations: int
    lp_calls: int = 0
    # last candidate set when the answer is negative
    remaining: frozenset[str] = field(default_factory=frozenset)

    def __bool__(self) -> bool:
        return self.reachable


def reachable(
    net: Cpn,
    m0: Marking,
    m: Marking,
    mode: ReachMode | str = ReachMode.FINITE,
    reverse_from: ReverseFrom | str = ReverseFrom.TARGET,
) -> ReachResult:
    """Is ``m`` reachable (``finite``) or limit-reachable (``limit``) from ``m0``?"""
    net.check_marking(m0)
    net.check_marking(m)
    if m == m0:
        return ReachResult(True, net.parikh(), frozenset(), 0)
    return _search(net, m0, m, lp.Relation.EQ, ReachMode(mode), ReverseFrom(reverse_from))


def at_least_reachable(
    net: Cpn,
    m0: Marking,
    goal: Marking,
    mode: ReachMode | str = ReachMode.FINITE,
    reverse_from: ReverseFrom | str = ReverseFrom.TARGET,
) -> ReachResult:
    """Is some marking ``m' >= goal`` (limit-)reachable from ``m0``?

    ``goal`` is normally zero outside the goal place(s). In finite mode the
    reverse check runs from ``m0 + C sol``, the marking actually reached.
    """
    net.check_marking(m0)
    net.check_marking(goal)
    if goal <= m0:
        return ReachResult(True, net.parikh(), frozenset(), 0)
    return _search(net, m0, goal, lp.Relation.GE, ReachMode(mode), ReverseFrom(reverse_from))


def _search(net: Cpn, m0: Marking, m: Marking, relation: lp.Relation, mode: ReachMode, reverse_from: ReverseFrom) -> ReachResult:
    nt = len(net.transitions)
    rhs = [a - b for a, b in zip(m.values, m0.values)]
    C = net.incidence
    current = list(range(nt))
    iterations = 0
    calls = 0
    while current:
        iterations += 1
        sub = [[row[j] for j in current] for row in C]
        objectives = []
        if mode is ReachMode.FINITE and relation is lp.Relation.GE and reverse_from is ReverseFrom.TARGET:
            # The reverse check depends on which places the reached marking
            # covers; mark every place some solution can mark.
            objectives = [(row, m0.values[p]) for p, row in enumerate(sub) if m0.values[p] or any(a > 0 for a in row)]
        found, extra = lp.positive_solutions(sub, rhs, range(len(current)), objectives, relation)
        calls += len(current) + len(objectives)
        sols = [v for v in found.values() if v is not None]
        if not sols:
            return _negative(net, iterations, calls, current)
        sols += [v for v in extra if v is not None]
        n = len(sols)
        sol = [Fraction(0)] * nt
        for v in sols:
            for k, x in enumerate(v):
                if x:
                    sol[current[k]] += x
        sol = [x / n for x in sol]
        reached = marking_after(net, m0, sol)
        _check_aggregate(reached, m.values, relation)
        support = [j for j in range(nt) if sol[j] > 0]
        kept = _restricted_max_fs(net, m0.values, support)
        if mode is ReachMode.FINITE:
            start = m0.values if reverse_from is ReverseFrom.INITIAL else reached
            kept = _restricted_max_fs(reverse(net), start, kept)
        if len(kept) == len(support):
            v = Parikh(net.transitions, tuple(sol))
            return ReachResult(True, v, v.support(), iterations, calls)
        current = kept
    return _negative(net, iterations, calls, current)


def _negative(net, iterations, calls, current):
    return ReachResult(False, None, frozenset(), iterations, calls, frozenset(net.transitions[j] for j in current))


def _check_aggregate(reached, target, relation) -> None:
    # The average of solutions of a convex system solves it too.
    for x, y in zip(reached, target):
        if (x != y) if relation is lp.Relation.EQ else (x < y):
            raise AssertionError("aggregated LP solution violates the constraint system")


def _restricted_max_fs(net: Cpn, values, sub) -> list[int]:
    # The maximal firing set of N_{T'} from m[•T'•]: places outside •T'• never
    # influence saturation over T', so the full marking gives the same answer.
    _, order, _ = fireable_indices(net, values, sub)
    return sorted(order)
