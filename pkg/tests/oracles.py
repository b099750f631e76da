"""Slow, independent reference answers used to cross-check the solvers."""

from __future__ import annotations

from fractions import Fraction
from itertools import chain, combinations
from typing import Optional, Sequence

from cpnyield import lp
from cpnyield.net import Cpn, Marking, _enab, marking_after, reverse


def solve_square(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Optional[list[Fraction]]:
    """Gauss-Jordan over Fractions; None when singular."""
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(A, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c] / M[c][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def vertices(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[tuple[Fraction, ...]]:
    """All basic feasible points of ``{x >= 0, A x <= b}`` by brute force."""
    n = len(A[0]) if A else 0
    rows = [list(map(Fraction, r)) for r in A] + [[Fraction(-(i == j)) for j in range(n)] for i in range(n)]
    rhs = list(map(Fraction, b)) + [Fraction(0)] * n
    out = set()
    for idx in combinations(range(len(rows)), n):
        x = solve_square([rows[i] for i in idx], [rhs[i] for i in idx])
        if x is None:
            continue
        if all(sum(a * xi for a, xi in zip(r, x)) <= bi for r, bi in zip(rows, rhs)):
            out.add(tuple(x))
    return sorted(out)


def best_vertex(c, A, b) -> Optional[Fraction]:
    vs = vertices(A, b)
    if not vs:
        return None
    return max(sum(Fraction(ci) * xi for ci, xi in zip(c, v)) for v in vs)


def to_le(prog: lp.LinearProgram) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Dense ``A x <= b`` form of a program with default bounds."""
    n = prog.num_vars
    A, b = [], []
    for row, rel, rhs in prog.constraints:
        dense = [Fraction(0)] * n
        for j, a in lp._items(row):
            dense[j] = Fraction(a)
        rel = lp.Relation(rel)
        if rel in (lp.Relation.LE, lp.Relation.EQ):
            A.append(dense)
            b.append(Fraction(rhs))
        if rel in (lp.Relation.GE, lp.Relation.EQ):
            A.append([-a for a in dense])
            b.append(-Fraction(rhs))
    for j, hi in enumerate(prog.upper):
        if hi is not None:
            A.append([Fraction(int(k == j)) for k in range(n)])
            b.append(Fraction(hi))
    return A, b


def simulate_fireable(net: Cpn, m0: Marking, sub) -> frozenset[str]:
    """Transitions of ``sub`` that can be fired by a positive amount in some
    sequence, found by actually firing half the enabling degree round by round."""
    mass = list(m0.values)
    C = net.incidence
    idx = [net.tidx(t) for t in sub]
    fired: set[int] = set()
    for _ in range(len(idx) + 1):
        for j in idx:
            degree, _ = _enab(net, mass, j)
            if degree == 0:
                continue
            alpha = Fraction(1) if degree == float("inf") else degree / 2
            for p in range(len(mass)):
                mass[p] += alpha * C[p][j]
            assert all(x >= 0 for x in mass)
            fired.add(j)
    return frozenset(net.transitions[j] for j in fired)


def powerset(items):
    items = list(items)
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


def in_firing_set(net: Cpn, m0_values, S) -> bool:
    m = Marking(net.places, tuple(m0_values))
    return simulate_fireable(net, m, S) == frozenset(S)


def exact_support_solution(net: Cpn, m0: Marking, target, S, relation: lp.Relation) -> Optional[tuple[Fraction, ...]]:
    """Some v with support exactly S and ``m0 + C v (==|>=) target``."""
    nt = len(net.transitions)
    cols = [net.tidx(t) for t in S]
    n = len(cols) + 1  # last variable z <= v_t for t in S
    C = net.incidence
    prog = lp.LinearProgram(n, sense=lp.Sense.MAXIMIZE, objective={n - 1: 1})
    for p in range(len(net.places)):
        prog.add({k: C[p][j] for k, j in enumerate(cols) if C[p][j]}, relation, target[p] - m0.values[p])
    for k in range(len(cols)):
        prog.add({k: 1, n - 1: -1}, lp.Relation.GE, 0)
    prog.upper = [None] * (n - 1) + [1]
    out = lp.solve(prog)
    if out.status is lp.Status.INFEASIBLE:
        return None
    if cols and (out.value is None or out.value <= 0):
        return None
    v = [Fraction(0)] * nt
    for k, j in enumerate(cols):
        v[j] = out.point[k]
    return tuple(v)


def reachable_oracle(net: Cpn, m0: Marking, m: Marking, finite: bool) -> bool:
    rev = reverse(net)
    for S in powerset(net.transitions):
        if not in_firing_set(net, m0.values, S):
            continue
        if finite and not in_firing_set(rev, m.values, S):
            continue
        if exact_support_solution(net, m0, m.values, S, lp.Relation.EQ) is not None:
            return True
    return False


def limit_at_least_oracle(net: Cpn, m0: Marking, goal: Marking) -> bool:
    for S in powerset(net.transitions):
        if in_firing_set(net, m0.values, S) and exact_support_solution(net, m0, goal.values, S, lp.Relation.GE) is not None:
            return True
    return False


def finite_at_least_oracle(net: Cpn, m0: Marking, goal: Marking) -> bool:
    """Some v with v+ = S, m' = m0 + C v >= goal, S forward-fireable from m0 and
    reverse-fireable from m'; the reached support Q is enumerated too."""
    rev = reverse(net)
    C = net.incidence
    for S in powerset(net.transitions):
        if not in_firing_set(net, m0.values, S):
            continue
        cols = [net.tidx(t) for t in S]
        for Q in powerset(range(len(net.places))):
            if not in_firing_set(rev, [int(p in Q) for p in range(len(net.places))], S):
                continue
            n = len(cols) + 1  # z <= v_t (t in S) and z <= m'_p (p in Q)
            prog = lp.LinearProgram(n, sense=lp.Sense.MAXIMIZE, objective={n - 1: 1}, upper=[None] * (n - 1) + [1])
            for p in range(len(net.places)):
                row = {k: C[p][j] for k, j in enumerate(cols) if C[p][j]}
                prog.add(row, lp.Relation.GE, goal.values[p] - m0.values[p])
                if p in Q:
                    prog.add({**row, n - 1: -1}, lp.Relation.GE, -m0.values[p])
                else:
                    prog.add(row, lp.Relation.EQ, -m0.values[p])
            for k in range(len(cols)):
                prog.add({k: 1, n - 1: -1}, lp.Relation.GE, 0)
            out = lp.solve(prog)
            if out.optimal and (out.value > 0 or (not cols and not Q)):
                return True
    return False


def restricted_yield(net: Cpn, m0: Marking, g: int, S) -> Optional[Fraction]:
    """max m(goal) over v >= 0 supported inside S with m0 + C v >= 0; None if unbounded."""
    cols = [net.tidx(t) for t in S]
    C = net.incidence
    if not cols:
        return m0.values[g]
    prog = lp.LinearProgram(
        len(cols),
        [({k: C[p][j] for k, j in enumerate(cols) if C[p][j]}, lp.Relation.GE, -m0.values[p]) for p in range(len(net.places))],
        objective={k: C[g][j] for k, j in enumerate(cols)},
        sense=lp.Sense.MAXIMIZE,
    )
    out = lp.solve(prog)
    if out.status is lp.Status.UNBOUNDED:
        return None
    return m0.values[g] + out.value


def limit_yield_oracle(net: Cpn, m0: Marking, goal: str):
    """Best yield over all firing-set members, by subset enumeration; "inf" when unbounded."""
    g = net.pidx(goal)
    best = m0.values[g]
    for S in powerset(net.transitions):
        if not in_firing_set(net, m0.values, S):
            continue
        y = restricted_yield(net, m0, g, S)
        if y is None:
            return "inf"
        best = max(best, y)
    return best


def apply(net: Cpn, m0: Marking, v) -> tuple[Fraction, ...]:
    return marking_after(net, m0, v)
