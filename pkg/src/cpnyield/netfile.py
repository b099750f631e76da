"""JSON file formats for nets, markings, Parikh vectors and results.

A net file looks like::

    {
      "format_version": "1",
      "name": "fig1",
      "places": [{"id": "p1", "initial": "1"}, ...],
      "transitions": [{"id": "t1", "in": {"p1": 2}, "out": {"p2": 1}}, ...]
    }

Token masses are exact rationals written as strings ("1/3", "0.25", "2").
Serialization is canonical: ids sorted, rationals in lowest terms, zero arcs
dropped. Parsing sorts ids too, so parse -> serialize -> parse is the identity.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Mapping, Optional

from .net import Cpn, Marking, NetError, Parikh

FORMAT_VERSION = "1"

_RATIONAL = re.compile(r"\s*(\d+(\.\d*)?|\.\d+|\d+\s*/\s*\d+)\s*")


class FormatError(NetError):
    """Malformed input; ``where`` is a JSON path or a ``line:col`` position."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


@dataclass
class NetFile:
    net: Cpn
    m0: Marking
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.net.name


def _load(text: str) -> Any:
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{exc.lineno}:{exc.colno}", exc.msg) from None


def fmt_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(value: Any, where: str) -> Fraction:
    """Nonnegative exact rational from a string, an int or an exact JSON decimal."""
    if isinstance(value, bool):
        raise FormatError(where, "expected a rational, got a boolean")
    if isinstance(value, int):
        x = Fraction(value)
    elif isinstance(value, Decimal):
        x = Fraction(value)
    elif isinstance(value, str):
        if value.strip().startswith("-"):
            raise FormatError(where, f"negative value {value!r}")
        if not _RATIONAL.fullmatch(value):
            raise FormatError(where, f"not a rational: {value!r}")
        try:
            x = Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise FormatError(where, f"zero denominator in {value!r}") from None
    else:
        raise FormatError(where, f"expected a rational, got {type(value).__name__}")
    if x < 0:
        raise FormatError(where, f"negative value {value}")
    return x


def _weight(value: Any, where: str) -> int:
    if isinstance(value, Decimal) or isinstance(value, str):
        x = parse_rational(value, where)
    elif isinstance(value, int) and not isinstance(value, bool):
        if value < 0:
            raise FormatError(where, f"negative arc weight {value}")
        x = Fraction(value)
    else:
        raise FormatError(where, f"arc weight must be a natural number, got {value!r}")
    if x.denominator != 1:
        raise FormatError(where, f"fractional arc weight {value}")
    return int(x)


def _expect(obj: Any, kind: type, where: str):
    if not isinstance(obj, kind):
        raise FormatError(where, f"expected {'an object' if kind is dict else 'a list'}")
    return obj


def _ident(value: Any, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise FormatError(where, "id must be a nonempty string")
    return value


def load_net(text: str) -> NetFile:
    doc = _expect(_load(text), dict, "$")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError("$.format_version", f"unsupported format version {version!r}")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise FormatError("$.name", "name must be a string")
    meta = {k: v for k, v in doc.items() if k not in ("format_version", "name", "places", "transitions")}

    initial: dict[str, Fraction] = {}
    for i, entry in enumerate(_expect(doc.get("places"), list, "$.places")):
        where = f"$.places[{i}]"
        _expect(entry, dict, where)
        pid = _ident(entry.get("id"), where + ".id")
        if pid in initial:
            raise FormatError(where + ".id", f"duplicate place {pid!r}")
        initial[pid] = parse_rational(entry.get("initial", "0"), where + ".initial")

    arcs: dict[str, tuple[dict[str, int], dict[str, int]]] = {}
    for i, entry in enumerate(_expect(doc.get("transitions", []), list, "$.transitions")):
        where = f"$.transitions[{i}]"
        _expect(entry, dict, where)
        tid = _ident(entry.get("id"), where + ".id")
        if tid in arcs:
            raise FormatError(where + ".id", f"duplicate transition {tid!r}")
        sides = []
        for key in ("in", "out"):
            side = _expect(entry.get(key, {}), dict, f"{where}.{key}")
            weights = {}
            for pid, w in side.items():
                if pid not in initial:
                    raise FormatError(f"{where}.{key}.{pid}", f"undeclared place {pid!r}")
                weights[pid] = _weight(w, f"{where}.{key}.{pid}")
            sides.append(weights)
        arcs[tid] = (sides[0], sides[1])

    places = sorted(initial)
    if set(places) & set(arcs):
        clash = sorted(set(places) & set(arcs))[0]
        raise FormatError("$", f"id {clash!r} names both a place and a transition")
    net = Cpn.from_arcs(places, {t: arcs[t] for t in sorted(arcs)}, name=name)
    m0 = Marking(net.places, tuple(initial[p] for p in places))
    return NetFile(net, m0, meta)


def parse_net(text: str) -> tuple[Cpn, Marking]:
    nf = load_net(text)
    return nf.net, nf.m0


def serialize_net(net: Cpn, m0: Marking, meta: Optional[Mapping[str, Any]] = None) -> str:
    net.check_marking(m0)
    doc: dict[str, Any] = {"format_version": FORMAT_VERSION, "name": net.name}
    for key in sorted(meta or {}):
        if key not in ("format_version", "name", "places", "transitions"):
            doc[key] = meta[key]
    doc["places"] = [{"id": p, "initial": fmt_rational(m0[p])} for p in sorted(net.places)]
    transitions = []
    for t in sorted(net.transitions):
        j = net.tidx(t)
        ins = {p: net.pre[i][j] for i, p in enumerate(net.places) if net.pre[i][j]}
        outs = {p: net.post[i][j] for i, p in enumerate(net.places) if net.post[i][j]}
        transitions.append({"id": t, "in": dict(sorted(ins.items())), "out": dict(sorted(outs.items()))})
    doc["transitions"] = transitions
    return json.dumps(doc, indent=2) + "\n"


def _vector(text: str, key: str, ids) -> dict[str, Fraction]:
    doc = _expect(_load(text), dict, "$")
    body = _expect(doc.get(key), dict, f"$.{key}")
    known = set(ids)
    out = {}
    for name, value in body.items():
        if name not in known:
            raise FormatError(f"$.{key}.{name}", f"unknown identifier {name!r}")
        out[name] = parse_rational(value, f"$.{key}.{name}")
    return out


def parse_marking(text: str, net: Cpn) -> Marking:
    """``{"marking": {place: rational}}``; omitted places hold zero."""
    return net.marking(_vector(text, "marking", net.places))


def parse_parikh(text: str, net: Cpn) -> Parikh:
    """``{"parikh": {transition: rational}}``; omitted transitions are zero."""
    return net.parikh(_vector(text, "parikh", net.transitions))


def serialize_marking(m: Marking) -> str:
    return json.dumps({"marking": {p: fmt_rational(x) for p, x in sorted(m.as_dict().items()) if x}}, indent=2) + "\n"


def serialize_parikh(v: Parikh) -> str:
    return json.dumps({"parikh": {t: fmt_rational(x) for t, x in sorted(v.as_dict().items()) if x}}, indent=2) + "\n"


def result_record(
    query: str,
    mode: str,
    value,
    support,
    parikh: Optional[Parikh],
    queries_or_cuts: int,
    wall_time_ms: float,
    **extra,
) -> dict[str, Any]:
    """Flat JSON-ready record of one solver answer."""
    rec: dict[str, Any] = {
        "query": query,
        "mode": mode,
        "yield": None if value is None else fmt_rational(value),
        "support": sorted(support),
        "parikh": {} if parikh is None else {t: fmt_rational(x) for t, x in sorted(parikh.as_dict().items()) if x},
        "queries_or_cuts": queries_or_cuts,
        "wall_time_ms": round(wall_time_ms, 3),
    }
    rec.update(extra)
    return rec
