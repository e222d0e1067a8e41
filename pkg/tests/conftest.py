from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from bmkp.model import ARBITRARY, IDENTICAL, Instance, Item

settings.register_profile("bmkp", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("bmkp")

# filled by test_acceptance, printed at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


def fractions(lo=0, hi=20, max_den=6):
    return st.builds(Fraction, st.integers(lo * max_den, hi * max_den), st.integers(1, max_den)) \
        .filter(lambda x: lo <= x <= hi)


@st.composite
def instances(draw, kind=None, max_n=8, max_m=3):
    kind = kind or draw(st.sampled_from([IDENTICAL, ARBITRARY]))
    n = draw(st.integers(0, max_n))
    m = draw(st.integers(1, max_m))
    items = []
    for i in range(1, n + 1):
        w = draw(fractions(1, 10))
        items.append(Item(i, draw(fractions(0, 10)), w))
    if kind == IDENTICAL:
        caps = (draw(fractions(1, 20)),) * m
    else:
        caps = tuple(sorted(draw(fractions(1, 20)) for _ in range(m)))
    return Instance(tuple(items), caps, kind)


@st.composite
def instance_and_assignment(draw, **kw):
    """An instance and a disjoint (not necessarily feasible) assignment."""
    inst = draw(instances(**kw))
    where = [draw(st.integers(-1, inst.m - 1)) for _ in inst.items]
    bundles = [set() for _ in range(inst.m)]
    for it, j in zip(inst.items, where):
        if j >= 0:
            bundles[j].add(it.id)
    return inst, bundles


@pytest.fixture
def tmp_file(tmp_path):
    return lambda name: tmp_path / name
