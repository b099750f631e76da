"""Exact rational linear programming.

A dense two-phase primal simplex over ``gmpy2.mpq``. Entering columns follow
Dantzig's rule until a run of degenerate pivots is observed, after which the
solver switches permanently to Bland's rule, so termination is guaranteed.
Results are reported as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from gmpy2 import mpq

Number = Union[int, Fraction]
Row = Union[Sequence[Number], Mapping[int, Number]]

# Consecutive degenerate pivots tolerated before falling back to Bland's rule.
_DEGENERATE_RUN = 25


class Relation(str, enum.Enum):
    LE = "<="
    EQ = "=="
    GE = ">="


class Sense(str, enum.Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"
    FEASIBILITY = "feasibility"


class Status(str, enum.Enum):
    INFEASIBLE = "infeasible"
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"


class LpError(ValueError):
    pass


@dataclass
class LinearProgram:
    """``sense  objective . x  s.t.  row . x  (<=|==|>=)  rhs`` for each constraint.

    Rows are dense sequences or sparse ``{var: coef}`` maps. Lower bounds default
    to 0 and upper bounds to none; ``None`` in ``lower`` makes a variable free
    from below.
    """

    num_vars: int
    constraints: list = field(default_factory=list)
    lower: Optional[Sequence[Optional[Number]]] = None
    upper: Optional[Sequence[Optional[Number]]] = None
    objective: Optional[Row] = None
    sense: Sense = Sense.FEASIBILITY

    def __post_init__(self):
        n = self.num_vars
        if self.lower is None:
            self.lower = [0] * n
        if self.upper is None:
            self.upper = [None] * n
        if len(self.lower) != n or len(self.upper) != n:
            raise LpError("bound vectors must have num_vars entries")
        for lo, hi in zip(self.lower, self.upper):
            if lo is not None and hi is not None and lo > hi:
                raise LpError(f"lower bound {lo} exceeds upper bound {hi}")
        for row, rel, _ in self.constraints:
            _check_row(row, n)
            Relation(rel)
        if self.objective is not None:
            _check_row(self.objective, n)
        self.sense = Sense(self.sense)

    def add(self, row: Row, rel: Relation | str, rhs: Number) -> None:
        _check_row(row, self.num_vars)
        self.constraints.append((row, Relation(rel), rhs))


def _check_row(row: Row, n: int) -> None:
    if isinstance(row, Mapping):
        if any(not 0 <= k < n for k in row):
            raise LpError("sparse row refers to a variable out of range")
    elif len(row) != n:
        raise LpError(f"row has {len(row)} entries, expected {n}")


def _items(row: Row):
    if isinstance(row, Mapping):
        return row.items()
    return enumerate(row)


@dataclass
class LpOutcome:
    """Solver result.

    ``point`` is an optimal vertex when optimal, and the last feasible basic
    point when unbounded (together with an improving ``ray``).
    """

    status: Status
    point: Optional[tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None
    ray: Optional[tuple[Fraction, ...]] = None
    nodes: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _q(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class Tableau:
    """Simplex tableau over nonnegative columns for a fixed constraint set.

    After construction (phase 1) the basis is feasible, and :meth:`maximize`
    may be called repeatedly with different objectives; each call warm-starts
    from the basis left by the previous one.
    """

    def __init__(self, rows: Sequence[Mapping[int, mpq]], rels: Sequence[Relation], rhs: Sequence[mpq], ncols: int):
        self.ncols = ncols
        self.pivots = 0
        tab: list[list] = []
        kinds = []
        for row, rel, b in zip(rows, rels, rhs):
            if b < 0:
                row = {k: -a for k, a in row.items()}
                b = -b
                rel = {Relation.LE: Relation.GE, Relation.GE: Relation.LE}.get(rel, rel)
            kinds.append((row, rel, b))
        n_slack = sum(1 for _, rel, _ in kinds if rel is not Relation.EQ)
        n_art = sum(1 for _, rel, _ in kinds if rel is not Relation.LE)
        width = ncols + n_slack + n_art
        self.first_art = ncols + n_slack
        basis = []
        s = ncols
        a = self.first_art
        zero = mpq(0)
        for row, rel, b in kinds:
            dense = [zero] * (width + 1)
            for k, x in row.items():
                dense[k] = x
            dense[-1] = b
            if rel is Relation.LE:
                dense[s] = mpq(1)
                basis.append(s)
                s += 1
            else:
                if rel is Relation.GE:
                    dense[s] = mpq(-1)
                    s += 1
                dense[a] = mpq(1)
                basis.append(a)
                a += 1
            tab.append(dense)
        self.width = width
        self.rows = tab
        self.basis = basis
        self.allowed = [True] * width
        self.feasible = self._phase_one()

    # -- core pivoting ---------------------------------------------------------

    def _pivot(self, r: int, c: int, obj: list) -> None:
        row = self.rows[r]
        piv = row[c]
        if piv != 1:
            inv = 1 / piv
            row = [x * inv if x else x for x in row]
            self.rows[r] = row
        nz = [j for j, x in enumerate(row) if x]
        for i, other in enumerate(self.rows):
            if i != r:
                f = other[c]
                if f:
                    for j in nz:
                        other[j] -= f * row[j]
        f = obj[c]
        if f:
            for j in nz:
                obj[j] -= f * row[j]
        self.basis[r] = c
        self.pivots += 1

    def _iterate(self, obj: list) -> Optional[int]:
        """Run simplex on ``obj`` (reduced costs, maximize). Returns an unbounded column or None."""
        bland = False
        degenerate = 0
        allowed = self.allowed
        while True:
            c = -1
            if bland:
                for j in range(self.width):
                    if allowed[j] and obj[j] > 0:
                        c = j
                        break
            else:
                best = 0
                for j in range(self.width):
                    d = obj[j]
                    if d > best and allowed[j]:
                        best, c = d, j
            if c < 0:
                return None
            r = -1
            ratio = None
            for i, row in enumerate(self.rows):
                a = row[c]
                if a > 0:
                    t = row[-1] / a
                    if ratio is None or t < ratio or (t == ratio and self.basis[i] < self.basis[r]):
                        ratio, r = t, i
            if r < 0:
                return c
            if ratio == 0:
                degenerate += 1
                if degenerate >= _DEGENERATE_RUN:
                    bland = True
            else:
                degenerate = 0
            self._pivot(r, c, obj)

    def _phase_one(self) -> bool:
        if self.first_art == self.width:
            return True
        obj = [mpq(0)] * (self.width + 1)
        for j in range(self.first_art, self.width):
            obj[j] = mpq(-1)
        for i, bvar in enumerate(self.basis):
            if bvar >= self.first_art:
                row = self.rows[i]
                for j, x in enumerate(row):
                    if x:
                        obj[j] += x
        self._iterate(obj)
        if obj[-1] > 0:
            return False
        # Drive zero-level artificials out of the basis; drop redundant rows.
        i = 0
        while i < len(self.rows):
            if self.basis[i] >= self.first_art:
                row = self.rows[i]
                c = next((j for j in range(self.first_art) if row[j]), -1)
                if c < 0:
                    del self.rows[i]
                    del self.basis[i]
                    continue
                self._pivot(i, c, obj)
            i += 1
        for j in range(self.first_art, self.width):
            self.allowed[j] = False
        return True

    # -- public ----------------------------------------------------------------

    def values(self) -> list:
        x = [mpq(0)] * self.ncols
        for i, bvar in enumerate(self.basis):
            if bvar < self.ncols:
                x[bvar] = self.rows[i][-1]
        return x

    def maximize(self, costs: Mapping[int, mpq]):
        """Maximize ``costs . y``. Returns ``(status, point, value, ray)`` over structural columns."""
        if not self.feasible:
            return Status.INFEASIBLE, None, None, None
        obj = [mpq(0)] * (self.width + 1)
        for j, c in costs.items():
            obj[j] = c
        for i, bvar in enumerate(self.basis):
            cb = costs.get(bvar)
            if cb:
                for j, x in enumerate(self.rows[i]):
                    if x:
                        obj[j] -= cb * x
        col = self._iterate(obj)
        point = self.values()
        if col is not None:
            ray = [mpq(0)] * self.ncols
            if col < self.ncols:
                ray[col] = mpq(1)
            for i, bvar in enumerate(self.basis):
                if bvar < self.ncols:
                    ray[bvar] = -self.rows[i][col]
            return Status.UNBOUNDED, point, None, ray
        return Status.OPTIMAL, point, -obj[-1], None


def _standardize(lp: LinearProgram):
    """Map ``lp`` onto nonnegative columns ``y``: ``x_j = offset_j + sum(sign * y)``."""
    maps = []
    ncols = 0
    bound_rows = []
    for lo, hi in zip(lp.lower, lp.upper):
        lo = None if lo is None else _q(lo)
        hi = None if hi is None else _q(hi)
        if lo is not None and hi is not None and lo == hi:
            maps.append((lo, ()))
        elif lo is not None:
            maps.append((lo, ((ncols, 1),)))
            if hi is not None:
                bound_rows.append(({ncols: mpq(1)}, Relation.LE, hi - lo))
            ncols += 1
        elif hi is not None:
            maps.append((hi, ((ncols, -1),)))
            ncols += 1
        else:
            maps.append((mpq(0), ((ncols, 1), (ncols + 1, -1))))
            ncols += 2
    rows, rels, rhs = [], [], []
    for row, rel, b in lp.constraints:
        rel = Relation(rel)
        b = _q(b)
        y: dict[int, mpq] = {}
        for j, a in _items(row):
            if not a:
                continue
            a = _q(a)
            off, cols = maps[j]
            b -= a * off
            for k, sgn in cols:
                y[k] = y.get(k, 0) + a * sgn
        y = {k: a for k, a in y.items() if a}
        if not y:
            ok = {Relation.LE: 0 <= b, Relation.EQ: b == 0, Relation.GE: 0 >= b}[rel]
            if not ok:
                return None
            continue
        rows.append(y)
        rels.append(rel)
        rhs.append(b)
    for y, rel, b in bound_rows:
        rows.append(y)
        rels.append(rel)
        rhs.append(b)
    return maps, ncols, rows, rels, rhs


def _recover(maps, y, with_offset=True) -> tuple[Fraction, ...]:
    out = []
    for off, cols in maps:
        x = off if with_offset else mpq(0)
        for k, sgn in cols:
            x += sgn * y[k]
        out.append(to_fraction(x))
    return tuple(out)


def solve(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly."""
    std = _standardize(lp)
    if std is None:
        return LpOutcome(Status.INFEASIBLE)
    maps, ncols, rows, rels, rhs = std
    tab = Tableau(rows, rels, rhs, ncols)
    if not tab.feasible:
        return LpOutcome(Status.INFEASIBLE)
    sign = {Sense.MAXIMIZE: 1, Sense.MINIMIZE: -1, Sense.FEASIBILITY: 0}[lp.sense]
    costs: dict[int, mpq] = {}
    const = mpq(0)
    if sign and lp.objective is not None:
        for j, c in _items(lp.objective):
            if not c:
                continue
            c = _q(c) * sign
            off, cols = maps[j]
            const += c * off
            for k, sgn in cols:
                costs[k] = costs.get(k, 0) + c * sgn
        costs = {k: c for k, c in costs.items() if c}
    status, y, value, ray = tab.maximize(costs)
    point = _recover(maps, y)
    if status is Status.UNBOUNDED:
        return LpOutcome(status, point, None, _recover(maps, ray, with_offset=False))
    return LpOutcome(Status.OPTIMAL, point, to_fraction((value + const) * (sign or 1)) if sign else Fraction(0))


def evaluate(row: Row, x: Sequence[Fraction]) -> Fraction:
    return sum((Fraction(a) * x[j] for j, a in _items(row) if a), Fraction(0))


def satisfies(lp: LinearProgram, x: Sequence[Fraction]) -> bool:
    """Exact feasibility check of a point against every constraint and bound."""
    for j, (lo, hi) in enumerate(zip(lp.lower, lp.upper)):
        if lo is not None and x[j] < lo or hi is not None and x[j] > hi:
            return False
    for row, rel, b in lp.constraints:
        lhs = evaluate(row, x)
        rel = Relation(rel)
        if rel is Relation.LE and lhs > b or rel is Relation.GE and lhs < b or rel is Relation.EQ and lhs != b:
            return False
    return True


def _system(C: Sequence[Sequence[Number]], rhs: Sequence[Number], relation: Relation | str):
    relation = Relation(relation)
    if relation is Relation.LE:
        raise LpError("relation must be equality or at-least")
    if len(C) != len(rhs):
        raise LpError(f"matrix has {len(C)} rows but rhs has {len(rhs)} entries")
    n = len(C[0]) if C else 0
    rows = []
    for r in C:
        if len(r) != n:
            raise LpError("ragged constraint matrix")
        rows.append({j: _q(a) for j, a in enumerate(r) if a})
    return rows, [relation] * len(rows), [_q(b) for b in rhs], n


def _positive(tab: Tableau, costs: Mapping[int, mpq], offset=0) -> Optional[tuple[Fraction, ...]]:
    # some feasible point with costs . y + offset > 0, or None
    status, y, value, ray = tab.maximize(costs)
    if status is Status.INFEASIBLE:
        return None
    if status is Status.UNBOUNDED:
        return tuple(to_fraction(a + d) for a, d in zip(y, ray))
    if value + offset > 0:
        return tuple(to_fraction(a) for a in y)
    return None


def solve_positive_component(C, rhs, t_index: int, relation: Relation | str = Relation.EQ):
    """Some ``v >= 0`` with ``v[t_index] > 0`` and ``C v (==|>=) rhs``, or ``None``.

    The strict inequality is decided by maximizing ``v[t_index]``.
    """
    rows, rels, b, n = _system(C, rhs, relation)
    if not 0 <= t_index < n:
        raise LpError("t_index out of range")
    return _positive(Tableau(rows, rels, b, n), {t_index: mpq(1)})


def solve_positive_components(C, rhs, indices: Sequence[int], relation: Relation | str = Relation.EQ):
    """:func:`solve_positive_component` for several indices on one shared tableau."""
    return positive_solutions(C, rhs, indices, (), relation)[0]


def positive_solutions(C, rhs, indices: Sequence[int], objectives, relation: Relation | str = Relation.EQ):
    """Per-index positive solutions plus, for each ``(costs, offset)`` in
    ``objectives``, some solution with ``costs . v + offset > 0`` (or ``None``).

    All programs share one tableau, each warm-started from the last.
    """
    rows, rels, b, n = _system(C, rhs, relation)
    tab = Tableau(rows, rels, b, n)
    found = {t: _positive(tab, {t: mpq(1)}) for t in indices}
    extra = []
    for costs, offset in objectives:
        costs = {j: _q(c) for j, c in _items(costs) if c}
        extra.append(_positive(tab, costs, _q(offset)) if tab.feasible else None)
    return found, extra
