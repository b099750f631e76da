from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cpnyield.net import (
    INF,
    Cpn,
    FiringError,
    InfeasibleVector,
    Marking,
    NetError,
    UnknownIdentifier,
    apply_parikh,
    enab,
    fire,
    restrict,
    reverse,
)
from cpnyield.witness import replay

from .conftest import nets_with_marking

F = Fraction


def test_fig1_enabling_degrees(f1):
    net, m0 = f1
    assert enab(net, m0, "t1") == F(1, 2)
    assert enab(net, m0, "t3") == 1
    assert enab(net, m0, "t2") == 0


def test_no_input_transition_has_infinite_degree():
    net = Cpn.from_arcs(("p",), {"src": ({}, {"p": 1})})
    assert enab(net, net.marking(), "src") == INF
    assert enab(net, net.marking({"p": 5}), "src") == INF


def test_fire_t3_by_alpha(f1):
    net, m0 = f1
    for a in (F(0), F(1, 3), F(1)):
        assert fire(net, m0, "t3", a).values == (1 - a, 0, 10 * a)
    assert fire(net, m0, "t3", 1).values == (0, 0, 10)


def test_fire_t1_half(f1):
    net, m0 = f1
    assert fire(net, m0, "t1", F(1, 2)).values == (0, F(1, 2), 0)


def test_fire_beyond_degree_raises(f1):
    net, m0 = f1
    with pytest.raises(FiringError) as err:
        fire(net, m0, "t1", 1)
    assert err.value.place == "p1"
    with pytest.raises(FiringError):
        fire(net, m0, "t2", F(1, 10))
    with pytest.raises(FiringError):
        fire(net, m0, "t3", -1)


def test_unknown_ids(f1):
    net, m0 = f1
    with pytest.raises(UnknownIdentifier):
        enab(net, m0, "t9")
    with pytest.raises(UnknownIdentifier):
        net.marking({"zz": 1})


def test_bad_net_and_vectors():
    with pytest.raises(NetError):
        Cpn(("p", "p"), (), ((), ()), ((), ()))
    with pytest.raises(NetError):
        Cpn(("p",), ("t",), ((-1,),), ((0,),))
    with pytest.raises(NetError):
        Cpn(("x",), ("x",), ((0,),), ((0,),))
    with pytest.raises(NetError):
        Marking(("p",), (F(-1),))
    with pytest.raises(TypeError):
        Marking(("p",), (0.5,))


def test_apply_parikh_examples(f1, f2):
    net, m0 = f2
    v = net.parikh({"t1": 1, "t2": 1})
    assert apply_parikh(net, m0, v).as_dict(nonzero=False) == {"p1": 0, "p2": 0, "pb": 0, "pg": 1}
    net, m0 = f1
    assert apply_parikh(net, m0, net.parikh()) == m0
    assert apply_parikh(net, m0, net.parikh({"t1": F(1, 2)})).values == (0, F(1, 2), 0)
    with pytest.raises(InfeasibleVector) as err:
        apply_parikh(net, m0, net.parikh({"t3": 2}))
    assert err.value.places == ("p1",)


def test_restrict_examples(f1, f2):
    net, _ = f1
    sub = restrict(net, ["t3"])
    assert sub.places == ("p1", "p3") and sub.transitions == ("t3",)
    assert restrict(net, net.transitions) == net
    net2, _ = f2
    assert restrict(net2, ["t2"]).places == ("p2", "pb")


def test_reverse_examples(f1):
    net, _ = f1
    rev = reverse(net)
    j = rev.tidx("t3")
    assert rev.pre[rev.pidx("p3")][j] == 10 and rev.post[rev.pidx("p1")][j] == 1
    assert reverse(rev) == net
    empty = Cpn(("p",), (), ((),), ((),))
    assert reverse(empty) == empty


@given(nets_with_marking(), st.data())
def test_firing_is_additive(nm, data):
    net, m = nm
    assume(net.transitions)
    t = data.draw(st.sampled_from(net.transitions))
    d = enab(net, m, t)
    cap = F(3) if d == INF else d
    a = cap * F(data.draw(st.integers(0, 6)), 6)
    b = (cap - a) * F(data.draw(st.integers(0, 6)), 6)
    once = fire(net, m, t, a + b)
    twice = fire(net, fire(net, m, t, a), t, b)
    assert once == twice
    assert all(x >= 0 for x in once.values)


@given(nets_with_marking(), st.data())
def test_replayed_sequence_matches_parikh(nm, data):
    net, m = nm
    seq = data.draw(st.lists(st.sampled_from(net.transitions), max_size=6)) if net.transitions else []
    counts = dict.fromkeys(net.transitions, F(0))
    cur = m
    for t in seq:
        d = enab(net, cur, t)
        a = F(1) if d == INF else d / 2
        cur = fire(net, cur, t, a)
        counts[t] += a
    v = net.parikh(counts)
    assert apply_parikh(net, m, v) == cur
    # the witness replay of that Parikh vector ends at the same marking when it completes
    r = replay(net, m, v) if all(x >= 0 for x in cur.values) else None
    if r is not None and r.completed:
        assert r.final == cur


@given(nets_with_marking(), st.data())
def test_restrict_commutes_with_reverse(nm, data):
    net, _ = nm
    sub = data.draw(st.sets(st.sampled_from(net.transitions))) if net.transitions else set()
    assert reverse(restrict(net, sub)) == restrict(reverse(net), sub)
