from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cpnyield.fixtures import fig1, fig2
from cpnyield.net import Cpn, Marking

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

MASSES = [Fraction(0), Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)]


@st.composite
def nets(draw, max_places=4, max_transitions=4, max_weight=3, min_transitions=0):
    np_ = draw(st.integers(1, max_places))
    nt = draw(st.integers(min_transitions, max_transitions))
    weight = st.integers(0, max_weight)
    pre = tuple(tuple(draw(weight) for _ in range(nt)) for _ in range(np_))
    post = tuple(tuple(draw(weight) for _ in range(nt)) for _ in range(np_))
    return Cpn(tuple(f"p{i}" for i in range(np_)), tuple(f"t{j}" for j in range(nt)), pre, post)


def markings(net: Cpn):
    return st.tuples(*[st.sampled_from(MASSES) for _ in net.places]).map(lambda vals: Marking(net.places, vals))


@st.composite
def nets_with_marking(draw, **kw):
    net = draw(nets(**kw))
    return net, draw(markings(net))


@pytest.fixture
def f1():
    return fig1()


@pytest.fixture
def f2():
    return fig2()


# acceptance lines, printed once at the end of the run
ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("-", "acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
