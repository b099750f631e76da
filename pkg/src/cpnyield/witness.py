"""Certificate checking and best-effort replay of Parikh vectors."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .firing import fireable_indices
from .net import Cpn, Marking, NetError, Parikh, _enab, marking_after, reverse
from .reach import ReachMode


def check_certificate(
    net: Cpn,
    m0: Marking,
    target: Marking,
    v: Parikh,
    mode: ReachMode | str = ReachMode.FINITE,
    at_least: bool = False,
) -> bool:
    """Does ``v`` certify that ``target`` is (limit-)reachable from ``m0``?

    Checks ``m0 + C v == target`` (``>=`` when ``at_least``), that ``v+`` is in
    the firing set from ``m0`` and, in finite mode, that ``v+`` is in the firing
    set of the reverse net from the marking actually reached.
    """
    net.check_marking(m0)
    net.check_marking(target)
    net.check_parikh(v)
    reached = marking_after(net, m0, v)
    if any(x < 0 for x in reached):
        return False
    if at_least:
        if any(x < y for x, y in zip(reached, target.values)):
            return False
    elif reached != target.values:
        return False
    support = v.support_indices()
    if not fireable_indices(net, m0.values, support)[0]:
        return False
    if ReachMode(mode) is ReachMode.FINITE:
        return fireable_indices(reverse(net), reached, support)[0]
    return True


@dataclass
class Replay:
    final: Marking
    schedule: list[tuple[str, Fraction]]
    completed: bool
    rounds: int


def replay(net: Cpn, m0: Marking, v: Parikh, max_rounds: int = 64) -> Replay:
    """Turn ``v`` into an explicit firing schedule, round by round.

    Each round visits the support in saturation order and fires a transition
    by its whole remaining quota when enabled enough, otherwise by
    ``min(enab, quota / 2)``. Limit-only certificates never complete; the
    partial schedule is returned with ``completed=False``.
    """
    net.check_marking(m0)
    net.check_parikh(v)
    reached = marking_after(net, m0, v)
    support = v.support_indices()
    ok, order, _ = fireable_indices(net, m0.values, support)
    if any(x < 0 for x in reached) or not ok:
        raise NetError("parikh vector is not a limit certificate from this marking")
    C = net.incidence
    mass = list(m0.values)
    quota = list(v.values)
    schedule: list[tuple[str, Fraction]] = []
    rounds = 0
    while rounds < max_rounds and any(quota[t] for t in order):
        rounds += 1
        for t in order:
            left = quota[t]
            if not left:
                continue
            degree, _ = _enab(net, mass, t)
            amount = left if left <= degree else min(degree, left / 2)
            if amount <= 0:
                continue
            for p in range(len(mass)):
                if C[p][t]:
                    mass[p] += amount * C[p][t]
            assert all(x >= 0 for x in mass)
            quota[t] = left - amount
            schedule.append((net.transitions[t], amount))
    done = not any(quota)
    return Replay(Marking(net.places, tuple(mass)), schedule, done, rounds)
