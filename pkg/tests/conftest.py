import sys
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from sievecalc.fincat import FIXTURE_NAMES, build_category, builtin
from sievecalc.topology import enumerate_topologies

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def c2():
    return builtin("C2")


@pytest.fixture
def c2_lattice(c2):
    # bottom, J2 ({f} covers b), J3 (empty sieve covers a), top
    return enumerate_topologies(c2)


@pytest.fixture(params=FIXTURE_NAMES)
def corpus_cat(request):
    return builtin(request.param)


@st.composite
def poset_categories(draw, max_objects=4):
    """Random finite posets viewed as categories (at most one arrow per pair)."""
    n = draw(st.integers(min_value=1, max_value=max_objects))
    rel = {(i, j): i == j for i in range(n) for j in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            rel[(i, j)] = draw(st.booleans())
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if rel[(i, k)] and rel[(k, j)]:
                    rel[(i, j)] = True
    objs = [f"o{i}" for i in range(n)]
    arrows = [(f"a{i}{j}", objs[i], objs[j]) for i in range(n) for j in range(n) if i != j and rel[(i, j)]]
    name = {(i, j): (f"1_o{i}" if i == j else f"a{i}{j}") for i in range(n) for j in range(n) if rel[(i, j)]}
    compose = [
        (name[(j, k)], name[(i, j)], name[(i, k)])
        for i in range(n) for j in range(n) for k in range(n)
        if rel[(i, j)] and rel[(j, k)] and i != j and j != k
    ]
    return build_category(objs, arrows, compose)


@st.composite
def categories(draw):
    return draw(st.one_of(st.sampled_from(FIXTURE_NAMES).map(builtin), poset_categories()))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
