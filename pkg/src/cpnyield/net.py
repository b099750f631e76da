"""Continuous Petri net structure, markings and firing semantics.

All quantities are exact: arc weights are Python ints and token masses are
:class:`fractions.Fraction`. Nets are immutable; markings and Parikh vectors
are value objects carrying the identifier tuple of the net they belong to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

INF = math.inf

# A nonnegative Fraction or ``INF``. ``math.inf`` already compares above every
# Fraction, which is all the enabling degree needs.
ExtendedRational = Union[Fraction, float]

Number = Union[int, Fraction, str]


class NetError(ValueError):
    """Malformed net, marking or vector."""


class UnknownIdentifier(NetError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument
        return str(self.args[0]) if self.args else ""


class FiringError(NetError):
    """A firing amount exceeds the enabling degree of the transition."""

    def __init__(self, transition: str, amount: Fraction, degree: ExtendedRational, place: str | None):
        self.transition = transition
        self.amount = amount
        self.degree = degree
        self.place = place
        super().__init__(
            f"cannot fire {transition} by {amount}: enabling degree is {degree}"
            + (f" (limited by place {place})" if place is not None else "")
        )


class InfeasibleVector(NetError):
    """Applying a Parikh vector drives some places negative."""

    def __init__(self, places: Sequence[str]):
        self.places = tuple(places)
        super().__init__("negative token mass on " + ", ".join(self.places))


def as_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a Fraction, int or 'p/q' string")
    return Fraction(x)


@dataclass(frozen=True)
class _Vector:
    names: tuple[str, ...]
    values: tuple[Fraction, ...]

    kind = "vector"

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "values", tuple(as_fraction(x) for x in self.values))
        if len(self.names) != len(self.values):
            raise NetError(f"{self.kind} has {len(self.values)} entries for {len(self.names)} identifiers")
        for name, x in zip(self.names, self.values):
            if x < 0:
                raise NetError(f"{self.kind} entry for {name} is negative ({x})")

    def __getitem__(self, key: str | int) -> Fraction:
        if isinstance(key, int):
            return self.values[key]
        try:
            return self.values[self._index[key]]
        except KeyError:
            raise UnknownIdentifier(f"unknown identifier {key!r}") from None

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    def as_dict(self, nonzero: bool = True) -> dict[str, Fraction]:
        return {n: x for n, x in zip(self.names, self.values) if x or not nonzero}

    def support(self) -> frozenset[str]:
        return frozenset(n for n, x in zip(self.names, self.values) if x > 0)

    def support_indices(self) -> frozenset[int]:
        return frozenset(i for i, x in enumerate(self.values) if x > 0)

    def __str__(self) -> str:
        body = ", ".join(f"{n}: {x}" for n, x in zip(self.names, self.values) if x)
        return f"({body})"


class Marking(_Vector):
    """Token mass per place."""

    kind = "marking"

    def __le__(self, other: "Marking") -> bool:
        return all(a <= b for a, b in zip(self.values, other.values))

    def __ge__(self, other: "Marking") -> bool:
        return all(a >= b for a, b in zip(self.values, other.values))


class Parikh(_Vector):
    """Aggregate firing amount per transition."""

    kind = "parikh vector"


@dataclass(frozen=True)
class Cpn:
    """A continuous Petri net ``(P, T, In, Out)``.

    ``pre[p][t]`` is the backward incidence ``In(p, t)`` and ``post[p][t]`` the
    forward incidence ``Out(p, t)``; both are ``|P| x |T|`` tuples of ints.
    """

    places: tuple[str, ...]
    transitions: tuple[str, ...]
    pre: tuple[tuple[int, ...], ...]
    post: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for label, ids in (("place", self.places), ("transition", self.transitions)):
            if len(set(ids)) != len(ids):
                raise NetError(f"duplicate {label} identifiers")
            for i in ids:
                if not isinstance(i, str) or not i:
                    raise NetError(f"{label} identifiers must be nonempty strings, got {i!r}")
        shared = set(self.places) & set(self.transitions)
        if shared:
            raise NetError("places and transitions share identifiers: " + ", ".join(sorted(shared)))
        nt = len(self.transitions)
        for label, mat in (("In", self.pre), ("Out", self.post)):
            if len(mat) != len(self.places) or any(len(row) != nt for row in mat):
                raise NetError(f"{label} matrix must be {len(self.places)} x {nt}")
            for row in mat:
                for w in row:
                    if isinstance(w, bool) or not isinstance(w, int) or w < 0:
                        raise NetError(f"arc weights must be natural numbers, got {w!r}")

    @classmethod
    def from_arcs(
        cls,
        places: Iterable[str],
        arcs: Mapping[str, tuple[Mapping[str, int], Mapping[str, int]]],
        name: str = "",
    ) -> "Cpn":
        """Build a net from ``{transition: (inputs, outputs)}`` weight maps."""
        places = tuple(places)
        pidx = {p: i for i, p in enumerate(places)}
        transitions = tuple(arcs)
        pre = [[0] * len(transitions) for _ in places]
        post = [[0] * len(transitions) for _ in places]
        for j, t in enumerate(transitions):
            ins, outs = arcs[t]
            for mat, side in ((pre, ins), (post, outs)):
                for p, w in side.items():
                    if p not in pidx:
                        raise UnknownIdentifier(f"transition {t} refers to undeclared place {p!r}")
                    mat[pidx[p]][j] = w
        return cls(places, transitions, tuple(map(tuple, pre)), tuple(map(tuple, post)), name)

    @cached_property
    def place_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.places)}

    @cached_property
    def transition_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.transitions)}

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """``C = Out - In`` as a ``|P| x |T|`` tuple."""
        return tuple(
            tuple(o - i for o, i in zip(orow, irow)) for orow, irow in zip(self.post, self.pre)
        )

    @cached_property
    def inputs(self) -> tuple[tuple[int, ...], ...]:
        """Input place indices ``•t`` per transition index."""
        return tuple(
            tuple(p for p in range(len(self.places)) if self.pre[p][t]) for t in range(len(self.transitions))
        )

    @cached_property
    def outputs(self) -> tuple[tuple[int, ...], ...]:
        """Output place indices ``t•`` per transition index."""
        return tuple(
            tuple(p for p in range(len(self.places)) if self.post[p][t]) for t in range(len(self.transitions))
        )

    def tidx(self, t: str) -> int:
        try:
            return self.transition_index[t]
        except KeyError:
            raise UnknownIdentifier(f"unknown transition {t!r}") from None

    def pidx(self, p: str) -> int:
        try:
            return self.place_index[p]
        except KeyError:
            raise UnknownIdentifier(f"unknown place {p!r}") from None

    def marking(self, mass: Mapping[str, Number] | Sequence[Number] | None = None) -> Marking:
        """Marking from a sparse ``{place: mass}`` map or a dense sequence."""
        return Marking(self.places, _densify(mass, self.places, self.pidx))

    def parikh(self, amount: Mapping[str, Number] | Sequence[Number] | None = None) -> Parikh:
        return Parikh(self.transitions, _densify(amount, self.transitions, self.tidx))

    def check_marking(self, m: Marking) -> None:
        if m.names != self.places:
            raise NetError("marking is not indexed by this net's places")

    def check_parikh(self, v: Parikh) -> None:
        if v.names != self.transitions:
            raise NetError("parikh vector is not indexed by this net's transitions")


def _densify(src, names, lookup) -> tuple[Fraction, ...]:
    if src is None:
        return (Fraction(0),) * len(names)
    if isinstance(src, Mapping):
        out = [Fraction(0)] * len(names)
        for k, x in src.items():
            out[lookup(k)] = as_fraction(x)
        return tuple(out)
    return tuple(as_fraction(x) for x in src)


def enab(net: Cpn, m: Marking, t: str) -> ExtendedRational:
    """Enabling degree of ``t`` at ``m``: ``min m(p)/In(p,t)`` over inputs, else ``INF``."""
    net.check_marking(m)
    return _enab(net, m.values, net.tidx(t))[0]


def _enab(net: Cpn, values: Sequence[Fraction], j: int) -> tuple[ExtendedRational, int | None]:
    best: ExtendedRational = INF
    arg = None
    for p in net.inputs[j]:
        d = Fraction(values[p]) / net.pre[p][j]
        if d < best:
            best, arg = d, p
    return best, arg


def fire(net: Cpn, m: Marking, t: str, alpha: Number) -> Marking:
    """Fire ``t`` by ``alpha`` from ``m``; raises :class:`FiringError` if not enabled enough."""
    net.check_marking(m)
    j = net.tidx(t)
    alpha = as_fraction(alpha)
    if alpha < 0:
        raise FiringError(t, alpha, _enab(net, m.values, j)[0], None)
    degree, arg = _enab(net, m.values, j)
    if alpha > degree:
        raise FiringError(t, alpha, degree, net.places[arg] if arg is not None else None)
    if not alpha:
        return m
    col = net.incidence
    return Marking(net.places, tuple(x + alpha * col[p][j] for p, x in enumerate(m.values)))


def marking_after(net: Cpn, m: Marking, v: Parikh | Sequence[Fraction]) -> tuple[Fraction, ...]:
    """``m + C v`` as a raw tuple, possibly with negative entries."""
    vals = v.values if isinstance(v, Parikh) else tuple(v)
    out = []
    for p, x in enumerate(m.values):
        row = net.incidence[p]
        out.append(x + sum((row[j] * a for j, a in enumerate(vals) if a and row[j]), Fraction(0)))
    return tuple(out)


def apply_parikh(net: Cpn, m: Marking, v: Parikh) -> Marking:
    """``m + C v``. Causal soundness is not checked; negative results raise."""
    net.check_marking(m)
    net.check_parikh(v)
    vals = marking_after(net, m, v)
    bad = [net.places[p] for p, x in enumerate(vals) if x < 0]
    if bad:
        raise InfeasibleVector(bad)
    return Marking(net.places, vals)


def restrict(net: Cpn, sub: Iterable[str]) -> Cpn:
    """The net restricted to ``sub`` over the places ``•sub•`` touching it."""
    keep = sorted({net.tidx(t) for t in sub})
    places = [p for p in range(len(net.places)) if any(net.pre[p][j] or net.post[p][j] for j in keep)]
    return Cpn(
        tuple(net.places[p] for p in places),
        tuple(net.transitions[j] for j in keep),
        tuple(tuple(net.pre[p][j] for j in keep) for p in places),
        tuple(tuple(net.post[p][j] for j in keep) for p in places),
        net.name,
    )


def reverse(net: Cpn) -> Cpn:
    """``N^-1``: the same net with In and Out swapped."""
    return Cpn(net.places, net.transitions, net.post, net.pre, net.name)


def project(m: Marking, net: Cpn) -> Marking:
    """Restrict a marking of a larger net to the places of ``net``."""
    return Marking(net.places, tuple(m[p] for p in net.places))
