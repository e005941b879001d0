"""Acceptance suites 1-10, runnable from pytest and from ``sievecalc selftest``.

Every suite takes a ``random.Random`` and returns a :class:`Outcome`. The
randomized suites draw from the built-in corpus only, so a seed pins the
whole run.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable

from .fincat import FinCat, builtin
from .localop import (
    OmegaPoint,
    check_relativization_theorem,
    classify,
    join_relativization_agrees,
    relativization_exists,
    relativization_witness,
)
from .proofsys import AxiomFamily, ProofFailure, check, prove, saturate, upward
from .sieve import Sieve, compose_sieves, pullback, sieve_universe
from .subtopos import (
    atoms,
    booleanization,
    closed_topology,
    complements_check,
    dense_closed_factorization,
    is_boolean,
    is_dense,
    is_skeletal,
    j_ideals,
    open_topology,
    quasiclosed_topology,
    zero_ideal,
)
from .errors import ConsistencyError
from .topology import (
    SieveFamily,
    axiom_witness,
    bottom,
    enumerate_topologies,
    generate_topology,
    generate_topology_oracle,
    hasse,
    implication,
    is_closed_sieve,
    is_topology,
    join,
    leq,
    meet,
    negation,
    second_definition_witness,
    sieve_closure,
    top,
)

CORPUS = ("C1", "C2", "D2", "M2", "SPAN")


@dataclass
class Outcome:
    passed: bool
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    note: str = ""

    def detail(self) -> str:
        text = f"{self.checked} checks"
        if self.note:
            text += f", {self.note}"
        if self.failures:
            text += f", first failure: {self.failures[0]}"
        return text


class _Tally:
    def __init__(self):
        self.checked = 0
        self.failures: list[str] = []

    def expect(self, cond: bool, what: str) -> None:
        self.checked += 1
        if not cond:
            self.failures.append(what)

    def outcome(self, note: str = "") -> Outcome:
        return Outcome(not self.failures, self.checked, self.failures, note)


def corpus() -> list[tuple[str, FinCat]]:
    return [(name, builtin(name)) for name in CORPUS]


def _lattices() -> dict[str, list]:
    return {name: enumerate_topologies(cat) for name, cat in corpus()}


def random_family(cat: FinCat, rng: random.Random, lattice=None) -> SieveFamily:
    """A random candidate family.

    Half the draws start from a random topology and flip one sieve, so
    both verdicts are exercised; the rest are uniform per-object subsets.
    """
    universe = sieve_universe(cat)
    if lattice and rng.random() < 0.5:
        sel = {c: set(s) for c, s in rng.choice(lattice).sel.items()}
        if rng.random() < 0.7:
            c = rng.choice(cat.objects)
            s = rng.choice(universe[c])
            sel[c] ^= {s}
    else:
        sel = {c: {s for s in universe[c] if rng.random() < 0.5} for c in cat.objects}
    return SieveFamily(cat, sel, check=False)


# -- raw brute force --------------------------------------------------------------


def _raw_sieves(cat: FinCat, c: str) -> list[frozenset[str]]:
    into = cat.arrows_into(c)
    out = []
    for r in range(len(into) + 1):
        for combo in itertools.combinations(into, r):
            s = frozenset(combo)
            if all(cat.compose(g, h) in s for g in s for h in cat.arrows_into(cat.dom(g))):
                out.append(s)
    return out


def raw_topologies(cat: FinCat) -> list[dict[str, frozenset[frozenset[str]]]]:
    """Every per-object assignment of sieve sets satisfying the three axioms."""
    sieves = {c: _raw_sieves(cat, c) for c in cat.objects}

    def pb(f, s):
        return frozenset(h for h in cat.arrows_into(cat.dom(f)) if cat.compose(f, h) in s)

    choices = []
    for c in cat.objects:
        subsets = []
        for r in range(len(sieves[c]) + 1):
            subsets.extend(frozenset(x) for x in itertools.combinations(sieves[c], r))
        choices.append(subsets)
    found = []
    for pick in itertools.product(*choices):
        j = dict(zip(cat.objects, pick))
        ok = all(frozenset(cat.arrows_into(c)) in j[c] for c in cat.objects)
        ok = ok and all(pb(f, s) in j[cat.dom(f)] for c in cat.objects for s in j[c] for f in cat.arrows_into(c))
        ok = ok and all(
            r in j[c]
            for c in cat.objects for s in j[c] for r in sieves[c]
            if all(pb(f, r) in j[cat.dom(f)] for f in s)
        )
        if ok:
            found.append(j)
    return found


# -- suites -----------------------------------------------------------------------


def suite_enumeration(rng: random.Random) -> Outcome:
    t = _Tally()
    expected = {"C1": 2, "C2": 4, "D2": 4}
    slowest = 0.0
    for name, n in expected.items():
        cat = builtin(name)
        start = time.perf_counter()
        lattice = enumerate_topologies(cat)
        elapsed = time.perf_counter() - start
        slowest = max(slowest, elapsed)
        t.expect(len(lattice) == n, f"{name}: {len(lattice)} topologies, expected {n}")
        t.expect(elapsed < 1.0, f"{name}: enumeration took {elapsed:.3f}s")
        raw = {tuple(sorted((c, tuple(sorted(tuple(sorted(s)) for s in ss))) for c, ss in j.items())) for j in raw_topologies(cat)}
        ours = {
            tuple(sorted((c, tuple(sorted(tuple(sorted(s.members)) for s in j[c]))) for c in cat.objects))
            for j in lattice
        }
        t.expect(raw == ours, f"{name}: enumeration differs from raw brute force")
    lattice = enumerate_topologies(builtin("C2"))
    edges = hasse(lattice)
    # 2x2 Boolean lattice: bottom below two incomparable elements, both below top
    t.expect(sorted(edges) == [(0, 1), (0, 2), (1, 3), (2, 3)], f"C2 Hasse edges {edges}")
    t.expect(not leq(lattice[1], lattice[2]) and not leq(lattice[2], lattice[1]), "C2 middle elements comparable")
    return t.outcome(f"slowest enumeration {slowest:.3f}s")


def suite_definitions(rng: random.Random, n: int = 10_000) -> Outcome:
    t = _Tally()
    cats = corpus()
    lattices = _lattices()
    positives = 0
    for i in range(n):
        name, cat = cats[i % len(cats)]
        fam = random_family(cat, rng, lattices[name])
        a = axiom_witness(fam) is None
        b = second_definition_witness(fam) is None
        positives += a
        t.expect(a == b, f"{name}: axioms say {a}, second definition says {b}")
    return t.outcome(f"{positives} topologies among {n} candidates")


def suite_generation(rng: random.Random, per_category: int = 500) -> Outcome:
    t = _Tally()
    start = time.perf_counter()
    for name, cat in corpus():
        lattice = enumerate_topologies(cat)
        for _ in range(per_category):
            fam = random_family(cat, rng)
            g = generate_topology(fam)
            t.expect(g == generate_topology_oracle(fam), f"{name}: formula and saturation differ")
            above = [k for k in lattice if leq(fam, k)]
            least = above[0]
            for k in above[1:]:
                least = meet(least, k)
            t.expect(g == least, f"{name}: generated topology is not the least one containing the family")
    elapsed = time.perf_counter() - start
    t.expect(elapsed < 60.0, f"generation suite took {elapsed:.1f}s")
    return t.outcome(f"{elapsed:.1f}s")


def suite_heyting(rng: random.Random) -> Outcome:
    t = _Tally()
    for name, cat in corpus():
        lattice = enumerate_topologies(cat)
        bot = bottom(cat)
        imp = {(a, b): implication(a, b) for a in lattice for b in lattice}
        for j in lattice:
            t.expect(negation(j) == imp[(j, bot)], f"{name}: negation differs from implication into bottom")
        for k, j1, j2 in itertools.product(lattice, repeat=3):
            t.expect(leq(meet(k, j1), j2) == leq(k, imp[(j1, j2)]), f"{name}: residuation fails")
            t.expect(meet(k, join(j1, j2)) == join(meet(k, j1), meet(k, j2)), f"{name}: distributivity fails")
    return t.outcome()


def _assignments(cat: FinCat, s: Sieve, universe, rng: random.Random, cap: int = 2000):
    members = cat.sort_arrows(s.members)
    choices = [universe[cat.dom(f)] for f in members]
    total = 1
    for ch in choices:
        total *= len(ch)
    if total <= cap:
        for pick in itertools.product(*choices):
            yield dict(zip(members, pick))
    else:
        for _ in range(cap):
            yield {f: rng.choice(ch) for f, ch in zip(members, choices)}


def suite_closure(rng: random.Random) -> Outcome:
    t = _Tally()
    for name, cat in corpus():
        lattice = enumerate_topologies(cat)
        universe = sieve_universe(cat)
        for j in lattice:
            for c in cat.objects:
                for r in universe[c]:
                    cl = sieve_closure(r, j)
                    t.expect(r.members <= cl.members, f"{name}: closure not inflationary")
                    t.expect(sieve_closure(cl, j) == cl, f"{name}: closure not idempotent")
                    for r2 in universe[c]:
                        if r.members <= r2.members:
                            t.expect(cl.members <= sieve_closure(r2, j).members, f"{name}: closure not monotone")
                    for f in cat.arrows_into(c):
                        t.expect(
                            pullback(cat, f, cl) == sieve_closure(pullback(cat, f, r), j),
                            f"{name}: closure does not commute with pullback along {f}",
                        )
                    for a in _assignments(cat, r, universe, rng):
                        closed = {f: sieve_closure(x, j) for f, x in a.items()}
                        t.expect(
                            sieve_closure(compose_sieves(cat, r, a), j)
                            == sieve_closure(compose_sieves(cat, r, closed), j),
                            f"{name}: composite closure identity fails",
                        )
                    for j2 in lattice:
                        if leq(j, j2):
                            t.expect(cl.members <= sieve_closure(r, j2).members, f"{name}: closure not monotone in J")
                            if is_closed_sieve(r, j2):
                                t.expect(is_closed_sieve(r, j), f"{name}: larger-topology closed sieve not closed")
    return t.outcome()


def suite_subtopos(rng: random.Random) -> Outcome:
    t = _Tally()
    for name, cat in corpus():
        lattice = enumerate_topologies(cat)
        t_top = top(cat)
        for j in lattice:
            for u in j_ideals(j):
                o = open_topology(j, u)
                cl = closed_topology(j, u)
                qc = quasiclosed_topology(j, u)
                t.expect(meet(o, cl) == j and join(o, cl) == t_top, f"{name}: open/closed not complementary")
                t.expect(complements_check(j, u), f"{name}: complements_check false")
                for k, label in ((o, "open"), (cl, "closed"), (qc, "quasi-closed")):
                    t.expect(bool(is_topology(k)) and leq(j, k), f"{name}: {label} output is not a topology above J")
            b = booleanization(j)
            t.expect(booleanization(b) == b, f"{name}: Booleanization not idempotent")
            t.expect(is_boolean(b), f"{name}: Booleanization not Boolean")
            t.expect(zero_ideal(b).objects == zero_ideal(j).objects, f"{name}: Booleanization not dense")
            for jp in lattice:
                if not leq(j, jp):
                    continue
                m = dense_closed_factorization(jp, j)
                t.expect(leq(j, m) and leq(m, jp), f"{name}: middle topology out of range")
                t.expect(is_dense(jp, m), f"{name}: upper part of factorization not dense")
                t.expect(dense_closed_factorization(m, j) == m, f"{name}: factorization not stable")
    return t.outcome()


def suite_atoms(rng: random.Random) -> Outcome:
    t = _Tally()
    for name, cat in corpus():
        for j in enumerate_topologies(cat):
            try:
                atoms(cat, j)
                t.expect(True, "")
            except ConsistencyError as exc:
                t.expect(False, f"{name}: {exc.message}")
    return t.outcome()


def suite_relativization(rng: random.Random) -> Outcome:
    t = _Tally()
    failing_witnesses = 0
    for name, cat in corpus():
        lattice = enumerate_topologies(cat)
        for j, k in itertools.product(lattice, repeat=2):
            exists = relativization_exists(k, j)
            if leq(j, k):
                t.expect(exists, f"{name}: no relativization for K >= J")
                t.expect(check_relativization_theorem(k, j), f"{name}: relativization theorem fails")
                kj = join(k, j)
                for c in cat.objects:
                    for s in sieve_universe(cat)[c]:
                        if is_closed_sieve(s, j):
                            p = OmegaPoint(c, s)
                            t.expect(classify(kj, p) == classify(k, p), f"{name}: join closure differs on closed sieve")
            if exists:
                t.expect(join_relativization_agrees(k, j), f"{name}: join does not relativize to the same operator")
            elif not leq(j, k):
                c, s = relativization_witness(k, j)
                image = sieve_closure(s, k)
                t.expect(is_closed_sieve(s, j) and not is_closed_sieve(image, j), f"{name}: bad failure witness")
                failing_witnesses += 1
    t.expect(failing_witnesses > 0, "no corpus pair without a relativization")
    return t.outcome(f"{failing_witnesses} pairs without relativization")


def suite_skeletal(rng: random.Random) -> Outcome:
    t = _Tally()
    for name, cat in corpus():
        lattice = enumerate_topologies(cat)
        for j, jp in itertools.product(lattice, repeat=2):
            if leq(j, jp) and is_dense(jp, j):
                t.expect(is_skeletal(jp, j), f"{name}: dense but not skeletal")
    c2 = enumerate_topologies(builtin("C2"))
    bot, j2, j3 = c2[0], c2[1], c2[2]
    t.expect(not is_skeletal(j3, bot), "C2: is_skeletal(J3, bottom) should be false")
    t.expect(is_skeletal(j2, bot), "C2: is_skeletal(J2, bottom) should be true")
    return t.outcome()


def suite_proofs(rng: random.Random, targets: int = 1000, upward_pairs: int = 100) -> Outcome:
    t = _Tally()
    cats = corpus()
    families = []
    for name, cat in cats:
        universe = sieve_universe(cat)
        for _ in range(8):
            sel = {c: [s for s in universe[c] if rng.random() < 0.3] for c in cat.objects}
            a = AxiomFamily(cat, itertools.chain.from_iterable(sel.values()))
            families.append((name, cat, a, generate_topology(SieveFamily(cat, sel))))
    # success set of prove equals the generated topology
    for name, cat, a, g in families:
        sat = saturate(a)
        t.expect(sat.topology == g, f"{name}: saturation differs from generated topology")
        for c in cat.objects:
            for s in sieve_universe(cat)[c]:
                d = prove(s, a)
                t.expect((not isinstance(d, ProofFailure)) == (s in g), f"{name}: prove disagrees on {s}")
    for _ in range(targets):
        name, cat, a, g = rng.choice(families)
        s = rng.choice(sorted(g, key=lambda x: (cat.object_index(x.on), sorted(cat.arrow_index(f) for f in x.members))))
        d = prove(s, a)
        t.expect(bool(check(d, a)), f"{name}: derivation of {s} does not check")
    for _ in range(upward_pairs):
        name, cat, a, g = rng.choice(families)
        universe = sieve_universe(cat)
        pairs = [(s, r) for c in cat.objects for s in universe[c] if s in g for r in universe[c] if s.members <= r.members]
        s, r = rng.choice(pairs)
        d = upward(cat, prove(s, a), r)
        t.expect(bool(check(d, a)) and d.conclusion == r, f"{name}: upward pattern fails for {s} <= {r}")
    return t.outcome()


SUITES: list[tuple[int, str, Callable[[random.Random], Outcome]]] = [
    (1, "enumeration goldens", suite_enumeration),
    (2, "definition equivalence", suite_definitions),
    (3, "generation oracle equivalence", suite_generation),
    (4, "Heyting laws", suite_heyting),
    (5, "closure operator laws", suite_closure),
    (6, "subtopos constructions", suite_subtopos),
    (7, "atoms", suite_atoms),
    (8, "relativization", suite_relativization),
    (9, "skeletality", suite_skeletal),
    (10, "proof system", suite_proofs),
]


def run_suite(number: int, seed: int = 0) -> Outcome:
    for n, _, fn in SUITES:
        if n == number:
            return fn(random.Random(f"{seed}:{n}"))
    raise KeyError(number)


def run_all(seed: int = 0, only: list[int] | None = None) -> list[tuple[int, str, Outcome, float]]:
    results = []
    for n, title, fn in SUITES:
        if only and n not in only:
            continue
        start = time.perf_counter()
        out = fn(random.Random(f"{seed}:{n}"))
        results.append((n, title, out, time.perf_counter() - start))
    return results
