import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import categories
from sievecalc.errors import CategoryMismatch, ObjectMismatch, RelativizationError
from sievecalc.fincat import FIXTURE_NAMES, builtin
from sievecalc.localop import (
    OmegaPoint,
    check_relativization_theorem,
    classify,
    closed_sieves,
    internal_and,
    internal_implies,
    internal_or,
    join_relativization_agrees,
    relativization_exists,
    relativization_witness,
    relativize,
)
from sievecalc.sieve import Sieve, all_sieves, maximal_sieve
from sievecalc.topology import bottom, enumerate_topologies, is_closed_sieve, join, leq


def test_omega_point_typing():
    with pytest.raises(ObjectMismatch):
        OmegaPoint("a", Sieve("b"))


def test_classify_examples(c2, c2_lattice):
    bot, j2, j3, t = c2_lattice
    for c in c2.objects:
        for s in all_sieves(c2, c):
            assert classify(bot, OmegaPoint(c, s)) == s
            assert classify(t, OmegaPoint(c, s)) == maximal_sieve(c2, c)
    assert classify(j3, OmegaPoint("b", Sieve("b"))) == Sieve("b", ["f"])


def test_internal_operations(c2):
    mb = maximal_sieve(c2, "b")
    f = Sieve("b", ["f"])
    assert internal_and(c2, "b", mb, f) == f
    assert internal_or(c2, "b", f, Sieve("b")) == f
    assert internal_implies(c2, "b", mb, f) == f
    with pytest.raises(ObjectMismatch):
        internal_and(c2, "a", mb, f)


@given(categories(), st.data())
def test_internal_operations_form_heyting_algebra(cat, data):
    c = data.draw(st.sampled_from(cat.objects))
    sieves = all_sieves(cat, c)
    s, t, u = (data.draw(st.sampled_from(sieves)) for _ in range(3))
    assert internal_or(cat, c, s, t).members == s.members | t.members
    # u /\ s <= t  iff  u <= (s => t)
    assert (internal_and(cat, c, u, s).members <= t.members) == (u.members <= internal_implies(cat, c, s, t).members)


def test_closed_sieves_examples(c2, c2_lattice):
    bot, j2, j3, t = c2_lattice
    for c in c2.objects:
        assert closed_sieves(bot, c) == list(all_sieves(c2, c))
        assert closed_sieves(t, c) == [maximal_sieve(c2, c)]
    assert closed_sieves(j2, "b") == [Sieve("b"), maximal_sieve(c2, "b")]


@given(categories(), st.data())
def test_local_operator_laws(cat, data):
    lattice = enumerate_topologies(cat)
    j = data.draw(st.sampled_from(lattice))
    c = data.draw(st.sampled_from(cat.objects))
    sieves = all_sieves(cat, c)
    s, t = data.draw(st.sampled_from(sieves)), data.draw(st.sampled_from(sieves))
    cl = lambda x: classify(j, OmegaPoint(c, x))
    assert cl(maximal_sieve(cat, c)) == maximal_sieve(cat, c)
    assert cl(cl(s)) == cl(s)
    if s.members <= t.members:
        assert cl(s).members <= cl(t).members
    assert cl(Sieve(c, s.members & t.members)) == Sieve(c, cl(s).members & cl(t).members)


def test_relativization_examples(c2, c2_lattice):
    bot, j2, j3, t = c2_lattice
    for j in c2_lattice:
        assert relativization_exists(bot, j)
        assert relativization_exists(j, t)
        assert check_relativization_theorem(t, j)
        assert check_relativization_theorem(j, j)
    rel = relativize(t, j2)
    assert rel("b", Sieve("b")) == maximal_sieve(c2, "b")
    assert all(rel(c, s) == maximal_sieve(c2, c) for (c, s) in rel.action)
    assert check_relativization_theorem(j2, bot)
    rb = relativize(j3, bot)
    assert all(rb(c, s) == classify(j3, OmegaPoint(c, s)) for (c, s) in rb.action)


def test_relativization_failure_witness(c2_lattice):
    bot, j2, j3, t = c2_lattice
    assert relativization_witness(j3, j2) == ("b", Sieve("b"))
    with pytest.raises(RelativizationError) as exc:
        relativize(j3, j2)
    doc = exc.value.to_document()
    assert doc["code"] == "no_relativization"
    assert doc["witness"] == {"object": "b", "sieve": {"on": "b", "arrows": []}, "image": {"on": "b", "arrows": ["f"]}}
    assert not is_closed_sieve(Sieve("b", ["f"]), j2)
    with pytest.raises(CategoryMismatch):
        relativization_exists(j3, bottom(builtin("C1")))


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_relativization_properties(name):
    lattice = enumerate_topologies(builtin(name))
    for j, k in itertools.product(lattice, repeat=2):
        if leq(j, k):
            assert relativization_exists(k, j)
            assert check_relativization_theorem(k, j)
        if relativization_exists(k, j):
            assert join_relativization_agrees(k, j)
    for j, k1, k2 in itertools.product(lattice, repeat=3):
        if relativization_exists(k1, j) and relativization_exists(k2, j):
            if relativize(k1, j).action == relativize(k2, j).action:
                assert join(k1, j) == join(k2, j)
