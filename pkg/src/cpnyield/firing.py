"""Firing-set membership by place saturation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .net import Cpn, Marking


@dataclass(frozen=True)
class Fireability:
    is_member: bool
    max_subset: frozenset[str]
    # Transitions of ``max_subset`` in the order saturation admitted them; each
    # one's inputs are marked initially or produced by an earlier entry.
    order: tuple[str, ...]
    passes: int

    def __iter__(self):
        # allows ``ok, subset = fireable(...)``
        return iter((self.is_member, self.max_subset))


def saturate(net: Cpn, marked: Iterable[int], sub: Sequence[int]) -> tuple[list[int], int]:
    """Admit transitions of ``sub`` whose inputs are all marked, growing the marked set.

    Returns the admission order and the number of passes. Within a pass,
    candidates are visited in net order and newly marked places count at once.
    """
    have = set(marked)
    pending = sorted(set(sub))
    order: list[int] = []
    passes = 0
    while pending:
        passes += 1
        rest = []
        for t in pending:
            if all(p in have for p in net.inputs[t]):
                order.append(t)
                have.update(net.outputs[t])
            else:
                rest.append(t)
        if len(rest) == len(pending):
            break
        pending = rest
    return order, passes


def fireable_indices(net: Cpn, values: Sequence, sub: Iterable[int]) -> tuple[bool, list[int], int]:
    sub = set(sub)
    order, passes = saturate(net, (p for p, x in enumerate(values) if x > 0), sub)
    return len(order) == len(sub), order, passes


def fireable(net: Cpn, m0: Marking, sub: Iterable[str]) -> Fireability:
    """Decide ``sub in FS(net, m0)``; otherwise report the largest firing set inside ``sub``."""
    net.check_marking(m0)
    idx = {net.tidx(t) for t in sub}
    ok, order, passes = fireable_indices(net, m0.values, idx)
    names = tuple(net.transitions[t] for t in order)
    return Fireability(ok, frozenset(names), names, passes)


def max_fs(net: Cpn, m0: Marking) -> frozenset[str]:
    """The unique maximal firing set of ``(net, m0)``."""
    return fireable(net, m0, net.transitions).max_subset
