"""Two small reference nets.

``fig1``: p1 feeds t1 (weight 2, producing p2) and t3 (producing 10 on p3);
t2 returns p2 to p1. The t1/t2 loop loses half of p1's mass per round, so the
empty marking is only reached in the limit.

``fig2``: t1 consumes p1 and pb to produce pg and p2; t2 turns p2 back into pb.
The state equation allows one unit on pg, yet pb starts empty so nothing can
fire. The arc structure is reconstructed from a prose description of the net.
"""

from __future__ import annotations

from .net import Cpn, Marking


def fig1() -> tuple[Cpn, Marking]:
    net = Cpn.from_arcs(
        ("p1", "p2", "p3"),
        {
            "t1": ({"p1": 2}, {"p2": 1}),
            "t2": ({"p2": 1}, {"p1": 1}),
            "t3": ({"p1": 1}, {"p3": 10}),
        },
        name="fig1",
    )
    return net, net.marking({"p1": 1})


def fig2() -> tuple[Cpn, Marking]:
    net = Cpn.from_arcs(
        ("p1", "p2", "pb", "pg"),
        {
            "t1": ({"p1": 1, "pb": 1}, {"pg": 1, "p2": 1}),
            "t2": ({"p2": 1}, {"pb": 1}),
        },
        name="fig2",
    )
    return net, net.marking({"p1": 1})
