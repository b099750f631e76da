"""Seeded instance generators.

Randomness comes from numpy's PCG64 bit generator seeded directly with the
integer seed, so instances are bit-identical across platforms.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

import numpy as np

from .net import Cpn, Marking, as_fraction

PRNG = "numpy.random.PCG64"


def rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def lattice_net(rows: int, cols: int) -> Cpn:
    """Grid of places; one unit-weight transition per east and per south edge."""
    if rows < 1 or cols < 1:
        raise ValueError("lattice needs at least one row and one column")
    w = max(len(str(rows - 1)), len(str(cols - 1)))

    def node(r, c):
        return f"n{r:0{w}d}_{c:0{w}d}"

    places = [node(r, c) for r in range(rows) for c in range(cols)]
    arcs = {}
    for r in range(rows):
        for c in range(cols - 1):
            arcs[f"e{r:0{w}d}_{c:0{w}d}"] = ({node(r, c): 1}, {node(r, c + 1): 1})
    for r in range(rows - 1):
        for c in range(cols):
            arcs[f"s{r:0{w}d}_{c:0{w}d}"] = ({node(r, c): 1}, {node(r + 1, c): 1})
    return Cpn.from_arcs(places, arcs, name=f"lattice-{rows}x{cols}")


def random_resources(net: Cpn, fraction, gen: np.random.Generator) -> tuple[Marking, str]:
    """Give mass 1 to a uniform ``ceil(fraction * |P|)``-subset of places; pick a uniform goal."""
    fraction = as_fraction(fraction)
    if not 0 < fraction <= 1:
        raise ValueError("resource fraction must lie in (0, 1]")
    n = len(net.places)
    k = math.ceil(fraction * n)
    chosen = gen.choice(n, size=k, replace=False)
    mass = [Fraction(0)] * n
    for p in chosen:
        mass[int(p)] = Fraction(1)
    goal = net.places[int(gen.integers(n))]
    return Marking(net.places, tuple(mass)), goal


def gen_lattice(rows: int, cols: int, seed: int, resource_fraction=Fraction(1, 10)) -> tuple[Cpn, Marking, str]:
    """A lattice net with random unit resources and a random goal place."""
    net = lattice_net(rows, cols)
    m0, goal = random_resources(net, resource_fraction, rng(seed))
    return net, m0, goal


def gen_random(
    num_places: int,
    num_transitions: int,
    max_weight: int,
    density,
    seed: int,
    min_inputs: int = 0,
    name: Optional[str] = None,
) -> Cpn:
    """Random net: every (place, transition, direction) arc independently with probability ``density``.

    Weights are uniform in ``1..max_weight``. A transition drawn without any
    output arc (or with fewer than ``min_inputs`` inputs) has that side redrawn.
    """
    density = as_fraction(density)
    if num_places < 1 or num_transitions < 0 or max_weight < 1:
        raise ValueError("sizes must be positive")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    gen = rng(seed)
    p_arc = float(density)
    wp = max(3, len(str(num_places - 1)))
    wt = max(3, len(str(max(num_transitions - 1, 0))))
    places = [f"p{i:0{wp}d}" for i in range(num_places)]

    def side(need: int) -> dict[str, int]:
        while True:
            hit = gen.random(num_places) < p_arc
            weights = gen.integers(1, max_weight + 1, size=num_places)
            arcs = {places[i]: int(weights[i]) for i in range(num_places) if hit[i]}
            if len(arcs) >= need:
                return arcs

    arcs = {}
    for j in range(num_transitions):
        ins = side(min(min_inputs, num_places))
        outs = side(1)
        arcs[f"t{j:0{wt}d}"] = (ins, outs)
    return Cpn.from_arcs(places, arcs, name=name or f"random-{seed}")
