from hypothesis import given
from hypothesis import strategies as st

from cpnyield.firing import fireable, max_fs
from cpnyield.net import Cpn, Marking

from . import oracles
from .conftest import nets_with_marking


def test_fig2_nothing_fires(f2):
    net, m0 = f2
    res = fireable(net, m0, ["t1", "t2"])
    assert not res.is_member and res.max_subset == frozenset()
    assert max_fs(net, m0) == frozenset()


def test_fig1_everything_fires(f1):
    net, m0 = f1
    ok, sub = fireable(net, m0, ["t1", "t2", "t3"])
    assert ok and sub == {"t1", "t2", "t3"}
    assert max_fs(net, m0) == {"t1", "t2", "t3"}
    # t2 waits for t1 to mark p2
    order = fireable(net, m0, net.transitions).order
    assert order.index("t1") < order.index("t2")


def test_empty_subset_is_member(f2):
    net, m0 = f2
    assert tuple(fireable(net, m0, [])) == (True, frozenset())


def test_zero_marking_fires_nothing():
    net = Cpn.from_arcs(("a", "b"), {"x": ({"a": 1}, {"b": 1}), "y": ({"b": 1}, {"a": 1})})
    assert max_fs(net, net.marking()) == frozenset()


@given(nets_with_marking(max_transitions=6))
def test_matches_simulated_firing(nm):
    net, m0 = nm
    assert max_fs(net, m0) == oracles.simulate_fireable(net, m0, net.transitions)


@given(nets_with_marking(max_transitions=5), st.data())
def test_subset_membership_matches_simulation(nm, data):
    net, m0 = nm
    sub = data.draw(st.sets(st.sampled_from(net.transitions))) if net.transitions else set()
    res = fireable(net, m0, sub)
    sim = oracles.simulate_fireable(net, m0, sub)
    assert res.max_subset == sim
    assert res.is_member == (sim == frozenset(sub))
    assert res.passes <= len(net.transitions)


@given(nets_with_marking(), st.data())
def test_monotone_in_marking(nm, data):
    net, m0 = nm
    extra = [data.draw(st.sampled_from([0, 1])) for _ in net.places]
    bigger = Marking(net.places, tuple(a + b for a, b in zip(m0.values, extra)))
    assert max_fs(net, m0) <= max_fs(net, bigger)


@given(nets_with_marking())
def test_idempotent(nm):
    net, m0 = nm
    top = max_fs(net, m0)
    assert tuple(fireable(net, m0, top)) == (True, top)


@given(nets_with_marking(max_transitions=8))
def test_saturation_order_is_a_firing_schedule(nm):
    # fire a small amount of each member in saturation order; all must be enabled when reached
    from fractions import Fraction

    from cpnyield.net import INF, enab, fire

    net, m0 = nm
    res = fireable(net, m0, net.transitions)
    cur = m0
    for t in res.order:
        d = enab(net, cur, t)
        assert d > 0
        cur = fire(net, cur, t, Fraction(1, 100) if d == INF else d / 2)
    assert len(res.order) == len(res.max_subset)
