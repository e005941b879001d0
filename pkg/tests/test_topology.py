import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import categories
from oracles import Raw
from sievecalc.errors import CategoryMismatch, GuardExceeded, NotATopology, NotPullbackStable
from sievecalc.fincat import FIXTURE_NAMES, builtin, empty_category
from sievecalc.sieve import Guard, Sieve, all_sieves, maximal_sieve, sieve_universe
from sievecalc.topology import (
    SieveFamily,
    Topology,
    as_topology,
    bottom,
    enumerate_topologies,
    family_from_json,
    generate_topology,
    generate_topology_oracle,
    hasse,
    implication,
    is_closed_sieve,
    is_topology,
    join,
    l_operator,
    leq,
    leq_matrix,
    meet,
    negation,
    pseudocomplement_formula,
    pullback_stabilize,
    r_operator,
    sieve_closure,
    top,
    topology_from_json,
    topology_to_json,
)


def fam(cat, *sieves):
    return SieveFamily.of(cat, sieves)


def test_enumeration_counts_match_raw_brute_force():
    for name, expected in [("C1", 2), ("C2", 4), ("D2", 4), ("M2", 3), ("SPAN", 8)]:
        cat = builtin(name)
        lattice = enumerate_topologies(cat)
        raw = Raw(cat)
        brute = raw.topologies()
        assert len(lattice) == len(brute) == expected
        assert {tuple(sorted(raw.encode(j).items())) for j in lattice} == {tuple(sorted(j.items())) for j in brute}
        for j in lattice:
            assert is_topology(j)


@given(categories())
def test_enumeration_matches_raw_on_random_posets(cat):
    raw = Raw(cat)
    if sum(len(raw.sieves[c]) for c in raw.objs) > 14:
        return
    lattice = enumerate_topologies(cat)
    assert {tuple(sorted(raw.encode(j).items())) for j in lattice} == {
        tuple(sorted(j.items())) for j in raw.topologies()
    }


def test_c2_lattice(c2, c2_lattice):
    bot, j2, j3, t = c2_lattice
    assert bot == bottom(c2) and t == top(c2)
    assert j2[c2.objects[1]] == {Sieve("b", ["f"]), maximal_sieve(c2, "b")}
    assert j3["a"] == {Sieve("a"), maximal_sieve(c2, "a")}
    assert hasse(c2_lattice) == [(0, 1), (0, 2), (1, 3), (2, 3)]
    assert hasse(enumerate_topologies(builtin("C1"))) == [(0, 1)]
    assert hasse([bot]) == []


def test_extremal_sizes(c2):
    c1 = builtin("C1")
    assert len(bottom(c1)["*"]) == 1 and len(top(c1)["*"]) == 2
    assert [len(top(c2)[c]) for c in c2.objects] == [2, 3]


def test_non_topology_witness(c2):
    f = SieveFamily(c2, {"a": [maximal_sieve(c2, "a")], "b": [maximal_sieve(c2, "b"), Sieve("b")]})
    v = is_topology(f)
    assert not v
    assert v.witness["axiom"] == "stability"
    assert v.second_definition is not None
    with pytest.raises(NotATopology):
        as_topology(f)


def test_meet_examples(c2_lattice):
    bot, j2, j3, t = c2_lattice
    assert meet(j2, j3) == bot
    for j in c2_lattice:
        assert meet(j, j) == j and meet(j, t) == j
        assert leq(bot, j) and leq(j, t)


def test_category_mismatch(c2):
    with pytest.raises(CategoryMismatch):
        meet(bottom(c2), bottom(builtin("C1")))


def test_r_operator_examples(c2):
    maximal = SieveFamily(c2, {c: [maximal_sieve(c2, c)] for c in c2.objects})
    everything = SieveFamily(c2, sieve_universe(c2))
    assert r_operator(maximal) == everything
    assert r_operator(SieveFamily(c2, {})) == everything
    d = pullback_stabilize(fam(c2, Sieve("a")))
    assert r_operator(d)["b"] == {Sieve("b", ["f"]), maximal_sieve(c2, "b")}
    with pytest.raises(NotPullbackStable):
        r_operator(fam(c2, Sieve("b", ["f"])))


def test_l_operator_examples(c2):
    maximal = SieveFamily(c2, {c: [maximal_sieve(c2, c)] for c in c2.objects})
    everything = SieveFamily(c2, sieve_universe(c2))
    assert l_operator(everything) == bottom(c2)
    assert l_operator(maximal) == top(c2)
    assert l_operator(SieveFamily(c2, {})) == top(c2)


def test_pullback_stabilize_examples(c2):
    assert pullback_stabilize(fam(c2, Sieve("b", ["f"]))) == fam(c2, Sieve("b", ["f"]), maximal_sieve(c2, "a"))
    stable = fam(c2, Sieve("a"), maximal_sieve(c2, "a"))
    assert pullback_stabilize(stable) == stable


def test_generation_examples(c2, c2_lattice):
    bot, j2, j3, t = c2_lattice
    cases = [(fam(c2, Sieve("a")), j3), (fam(c2), bot), (fam(c2, Sieve("b", ["f"])), j2)]
    for f, expected in cases:
        assert generate_topology(f) == expected
        assert generate_topology_oracle(f) == expected
    assert generate_topology_oracle(SieveFamily(c2, sieve_universe(c2))) == t
    assert generate_topology_oracle(j2) == j2


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_generation_matches_raw_smallest(name):
    cat = builtin(name)
    raw = Raw(cat)
    brute = raw.topologies()
    universe = sieve_universe(cat)
    pool = [s for c in cat.objects for s in universe[c]]
    for k in range(3):
        for combo in itertools.combinations(pool, k):
            f = SieveFamily.of(cat, combo)
            g = generate_topology(f)
            assert raw.encode(g) == raw.smallest_containing(f, brute)
            assert generate_topology_oracle(f) == g


def test_join_examples(c2_lattice):
    bot, j2, j3, t = c2_lattice
    assert join(j2, j3) == t
    for j in c2_lattice:
        assert join(j, bot) == j and join(j, j) == j


def test_implication_and_negation_examples(c2_lattice):
    bot, j2, j3, t = c2_lattice
    for j in c2_lattice:
        assert implication(t, j) == j
        assert implication(j, t) == t
        assert negation(j) == implication(j, bot) == pseudocomplement_formula(j)
    assert implication(j2, bot) == j3
    assert negation(bot) == t and negation(t) == bot
    assert negation(j2) == j3 and negation(j3) == j2


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_residuation(name):
    lattice = enumerate_topologies(builtin(name))
    for k, j1, j2 in itertools.product(lattice, repeat=3):
        assert leq(meet(k, j1), j2) == leq(k, implication(j1, j2))


def test_closure_examples(c2, c2_lattice):
    bot, j2, j3, t = c2_lattice
    for c in c2.objects:
        for r in all_sieves(c2, c):
            assert sieve_closure(r, bot) == r and is_closed_sieve(r, bot)
            assert sieve_closure(r, t) == maximal_sieve(c2, c)
            assert is_closed_sieve(r, t) == (r == maximal_sieve(c2, c))
    assert sieve_closure(Sieve("b"), j3) == Sieve("b", ["f"])
    assert is_closed_sieve(Sieve("b", ["f"]), j3)


@given(categories(), st.data())
def test_l_operator_output_is_topology(cat, data):
    universe = sieve_universe(cat)
    sel = {c: data.draw(st.sets(st.sampled_from(universe[c]))) for c in cat.objects}
    d = pullback_stabilize(SieveFamily(cat, sel))
    assert is_topology(l_operator(d))
    assert generate_topology(d) == generate_topology_oracle(d)


@given(categories(), st.data())
def test_verdicts_agree_on_random_families(cat, data):
    universe = sieve_universe(cat)
    sel = {c: data.draw(st.sets(st.sampled_from(universe[c]))) for c in cat.objects}
    f = SieveFamily(cat, sel)
    v = is_topology(f)
    assert bool(v) == (v.second_definition is None)
    assert bool(v) == Raw(cat).is_topology(Raw(cat).encode(f))


def test_json_round_trip(c2_lattice):
    for j in c2_lattice:
        doc = topology_to_json(j)
        assert topology_from_json(j.cat, doc) == j
        assert family_from_json(j.cat, [{"on": s.on, "arrows": sorted(s.members)} for s in j]) == j
    assert topology_to_json(c2_lattice[1]) == {"covers": {"a": [["1_a"]], "b": [["f"], ["1_b", "f"]]}}


def test_leq_matrix(c2_lattice):
    m = leq_matrix(c2_lattice)
    assert m[0] == [True] * 4 and m[1] == [False, True, False, True]


def test_guard_refusal():
    with pytest.raises(GuardExceeded, match="max_sieves"):
        enumerate_topologies(builtin("SPAN"), Guard(max_sieves=5))


def test_empty_category_has_one_topology():
    lattice = enumerate_topologies(empty_category())
    assert len(lattice) == 1 and isinstance(lattice[0], Topology)


def test_enumeration_is_deterministic():
    a = [topology_to_json(j) for j in enumerate_topologies(builtin("SPAN"))]
    b = [topology_to_json(j) for j in enumerate_topologies(builtin("SPAN"))]
    assert a == b
