"""Grothendieck topologies on a finite category.

Topologies are stored extensionally: for every object, the set of its
covering sieves. All constructions here are direct loops over the finite
sieve universe, so each is guarded (see :class:`~sievecalc.sieve.Guard`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import (
    CategoryMismatch,
    ConsistencyError,
    GuardExceeded,
    NotASieve,
    NotATopology,
    NotPullbackStable,
    ObjectMismatch,
)
from .fincat import FinCat
from .sieve import (
    DEFAULT_GUARD,
    Guard,
    Sieve,
    compose_sieves,
    is_sieve,
    maximal_sieve,
    pullback,
    sieve_from_json,
    sieve_key,
    sieve_to_json,
    sieve_universe,
)

# Upper bound on the number of sieve assignments tried when checking the
# composite-closure clause of the second definition.
MAX_COMPOSITE_ASSIGNMENTS = 200_000


class SieveFamily:
    """A choice of sieves on every object (a candidate subobject of Omega)."""

    def __init__(self, cat: FinCat, sel: Mapping[str, Iterable[Sieve]], *, check: bool = True):
        self.cat = cat
        if check:
            for c in sel:
                cat.check_object(c)
        self.sel: dict[str, frozenset[Sieve]] = {c: frozenset(sel.get(c, ())) for c in cat.objects}
        if check:
            for c, sieves in self.sel.items():
                for s in sieves:
                    if s.on != c:
                        raise ObjectMismatch(f"sieve on {s.on!r} listed under object {c!r}", c)
                    for f in s.members:
                        if cat.cod(f) != c:
                            raise ObjectMismatch(f"arrow {f!r} in a sieve on {c!r} has the wrong codomain", f)
                    if not is_sieve(cat, s):
                        raise NotASieve(f"{sorted(s.members)} on {c!r} is not a sieve", sieve_to_json(cat, s))

    @classmethod
    def of(cls, cat: FinCat, sieves: Iterable[Sieve]) -> "SieveFamily":
        """Family from a flat collection of sieves."""
        sel: dict[str, set[Sieve]] = {}
        for s in sieves:
            sel.setdefault(s.on, set()).add(s)
        return cls(cat, sel)

    def __getitem__(self, c: str) -> frozenset[Sieve]:
        return self.sel[c]

    def __contains__(self, s: Sieve) -> bool:
        return s in self.sel.get(s.on, ())

    def __iter__(self) -> Iterator[Sieve]:
        for c in self.cat.objects:
            yield from sorted(self.sel[c], key=lambda s: sieve_key(self.cat, s))

    def __len__(self) -> int:
        return sum(len(v) for v in self.sel.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SieveFamily):
            return NotImplemented
        return self.cat == other.cat and self.sel == other.sel

    def __hash__(self) -> int:
        return hash(tuple(self.sel[c] for c in self.cat.objects))

    def __repr__(self) -> str:
        body = ", ".join(f"{c}: {sorted(sorted(s.members) for s in self.sel[c])}" for c in self.cat.objects)
        return f"{type(self).__name__}({{{body}}})"

    @cached_property
    def is_pullback_stable(self) -> bool:
        return pullback_witness(self) is None

    def size_vector(self) -> tuple[int, ...]:
        return tuple(len(self.sel[c]) for c in self.cat.objects)


class Topology(SieveFamily):
    """A family of covering sieves satisfying the Grothendieck axioms.

    Instances built by this module's operations are topologies by
    construction; wrap an arbitrary family with :func:`as_topology` to get
    a checked one.
    """

    @property
    def covers(self) -> dict[str, frozenset[Sieve]]:
        return self.sel

    def covering(self, s: Sieve) -> bool:
        return s in self.sel[s.on]


def _trusted(cls, cat: FinCat, sel: Mapping[str, Iterable[Sieve]]):
    return cls(cat, sel, check=False)


def _same_cat(*families: SieveFamily) -> FinCat:
    cat = families[0].cat
    for f in families[1:]:
        if f.cat != cat:
            raise CategoryMismatch("operands live on different categories")
    return cat


# -- axiom checking ---------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: dict | None = None
    second_definition: dict | None = field(default=None, compare=False)

    def __bool__(self) -> bool:
        return self.ok


def pullback_witness(F: SieveFamily) -> dict | None:
    cat = F.cat
    for c in cat.objects:
        for s in sorted(F[c], key=lambda s: sieve_key(cat, s)):
            for f in cat.arrows_into(c):
                if pullback(cat, f, s) not in F[cat.dom(f)]:
                    return _witness(cat, "stability", c, s, arrow=f,
                                    detail=f"pullback along {f} is not in the family")
    return None


def _witness(cat: FinCat, axiom: str, c: str, s: Sieve | None = None, **extra) -> dict:
    w = {"axiom": axiom, "object": c}
    if s is not None:
        w["sieve"] = cat.sort_arrows(s.members)
    for k, v in extra.items():
        if isinstance(v, Sieve):
            v = cat.sort_arrows(v.members)
        w[k] = v
    return w


def axiom_witness(F: SieveFamily, guard: Guard = DEFAULT_GUARD) -> dict | None:
    """First failure of maximality, stability or transitivity, else None."""
    cat = F.cat
    universe = sieve_universe(cat, guard)
    for c in cat.objects:
        if maximal_sieve(cat, c) not in F[c]:
            return _witness(cat, "maximality", c, maximal_sieve(cat, c))
    w = pullback_witness(F)
    if w is not None:
        return w
    for c in cat.objects:
        for s in sorted(F[c], key=lambda s: sieve_key(cat, s)):
            for r in universe[c]:
                if r in F[c]:
                    continue
                if all(pullback(cat, f, r) in F[cat.dom(f)] for f in s.members):
                    return _witness(cat, "transitivity", c, s, sieve_r=r,
                                    detail="every pullback of R along S covers but R does not")
    return None


def second_definition_witness(F: SieveFamily, guard: Guard = DEFAULT_GUARD) -> dict | None:
    """First failure of the clauses (i)-(iv) of the alternative definition.

    (i) maximal sieves cover; (ii) covering sieves are upward closed;
    (iii) every pullback of a covering sieve contains a covering sieve;
    (iv) composites of covering sieves with covering sieves cover.
    """
    cat = F.cat
    universe = sieve_universe(cat, guard)
    for c in cat.objects:
        if maximal_sieve(cat, c) not in F[c]:
            return _witness(cat, "(i)", c, maximal_sieve(cat, c))
    for c in cat.objects:
        for t in sorted(F[c], key=lambda s: sieve_key(cat, s)):
            for s in universe[c]:
                if s.members >= t.members and s not in F[c]:
                    return _witness(cat, "(ii)", c, t, superset=s)
    for c in cat.objects:
        for r in sorted(F[c], key=lambda s: sieve_key(cat, s)):
            for g in cat.arrows_into(c):
                d = cat.dom(g)
                if not any(all(cat.compose(g, f) in r.members for f in s.members) for s in F[d]):
                    return _witness(cat, "(iii)", c, r, arrow=g)
    budget = MAX_COMPOSITE_ASSIGNMENTS
    for c in cat.objects:
        for s in sorted(F[c], key=lambda s: sieve_key(cat, s)):
            members = cat.sort_arrows(s.members)
            choices = [sorted(F[cat.dom(f)], key=lambda t: sieve_key(cat, t)) for f in members]
            n = 1
            for ch in choices:
                n *= len(ch)
            budget -= n
            if budget < 0:
                raise GuardExceeded(
                    f"composite-closure check needs more than {MAX_COMPOSITE_ASSIGNMENTS} assignments",
                    {"bound": "composite_assignments"},
                )
            for pick in itertools.product(*choices):
                r = compose_sieves(cat, s, dict(zip(members, pick)))
                if r not in F[c]:
                    return _witness(cat, "(iv)", c, s, composite=r,
                                    assignment={f: cat.sort_arrows(t.members) for f, t in zip(members, pick)})
    return None


def is_topology(F: SieveFamily, guard: Guard = DEFAULT_GUARD) -> Verdict:
    """Check the three axioms and, independently, the second definition.

    The two verdicts must agree; a disagreement raises ConsistencyError.
    """
    w1 = axiom_witness(F, guard)
    w2 = second_definition_witness(F, guard)
    if (w1 is None) != (w2 is None):
        raise ConsistencyError(
            "axiom triple and second definition disagree",
            {"axioms": w1, "second_definition": w2},
        )
    return Verdict(w1 is None, w1, w2)


def as_topology(F: SieveFamily, guard: Guard = DEFAULT_GUARD) -> Topology:
    if isinstance(F, Topology):
        return F
    v = is_topology(F, guard)
    if not v:
        raise NotATopology(f"family violates the {v.witness['axiom']} axiom", v.witness)
    return _trusted(Topology, F.cat, F.sel)


# -- extremal elements, order, meet -----------------------------------------------


def bottom(cat: FinCat) -> Topology:
    return _trusted(Topology, cat, {c: (maximal_sieve(cat, c),) for c in cat.objects})


def top(cat: FinCat, guard: Guard = DEFAULT_GUARD) -> Topology:
    return _trusted(Topology, cat, sieve_universe(cat, guard))


def leq(j1: SieveFamily, j2: SieveFamily) -> bool:
    cat = _same_cat(j1, j2)
    return all(j1[c] <= j2[c] for c in cat.objects)


def meet(j1: Topology, j2: Topology) -> Topology:
    cat = _same_cat(j1, j2)
    return _trusted(Topology, cat, {c: j1[c] & j2[c] for c in cat.objects})


def family_union(f1: SieveFamily, f2: SieveFamily) -> SieveFamily:
    cat = _same_cat(f1, f2)
    return _trusted(SieveFamily, cat, {c: f1[c] | f2[c] for c in cat.objects})


# -- closure of sieves ------------------------------------------------------------


def sieve_closure(r: Sieve, j: SieveFamily) -> Sieve:
    """The arrows ``f`` into ``r.on`` whose pullback of ``r`` covers."""
    cat = j.cat
    return Sieve(r.on, (f for f in cat.arrows_into(r.on) if pullback(cat, f, r) in j[cat.dom(f)]))


def is_closed_sieve(r: Sieve, j: SieveFamily) -> bool:
    return sieve_closure(r, j) == r


# -- the r/l operators and generated topologies -----------------------------------


def pullback_stabilize(F: SieveFamily) -> SieveFamily:
    cat = F.cat
    sel = {c: set(F[c]) for c in cat.objects}
    for c in cat.objects:
        for s in F[c]:
            for f in cat.arrows_into(c):
                sel[cat.dom(f)].add(pullback(cat, f, s))
    # a pullback of a pullback is a pullback, so one pass suffices
    return _trusted(SieveFamily, cat, sel)


def _require_stable(D: SieveFamily) -> None:
    w = pullback_witness(D)
    if w is not None:
        raise NotPullbackStable("family is not stable under pullback", w)


def r_operator(D: SieveFamily, guard: Guard = DEFAULT_GUARD) -> SieveFamily:
    """Sieves ``T`` such that ``S in D(d)`` and ``S <= f*(T)`` force ``f in T``."""
    _require_stable(D)
    cat = D.cat
    universe = sieve_universe(cat, guard)
    sel = {}
    for c in cat.objects:
        keep = []
        for t in universe[c]:
            ok = True
            for f in cat.arrows_into(c):
                if f in t.members:
                    continue
                ft = pullback(cat, f, t).members
                if any(s.members <= ft for s in D[cat.dom(f)]):
                    ok = False
                    break
            if ok:
                keep.append(t)
        sel[c] = keep
    return _trusted(SieveFamily, cat, sel)


def l_operator(D: SieveFamily, guard: Guard = DEFAULT_GUARD) -> Topology:
    """Sieves ``S`` such that ``Z in D(d)`` and ``f*(S) <= Z`` force ``Z`` maximal."""
    _require_stable(D)
    cat = D.cat
    universe = sieve_universe(cat, guard)
    # only non-maximal members of D can refute anything
    proper = {d: [z.members for z in D[d] if cat.identity[d] not in z.members] for d in cat.objects}
    sel = {}
    for c in cat.objects:
        keep = []
        for s in universe[c]:
            if all(
                not any(pullback(cat, f, s).members <= z for z in proper[cat.dom(f)])
                for f in cat.arrows_into(c)
            ):
                keep.append(s)
        sel[c] = keep
    return _trusted(Topology, cat, sel)


def generate_topology(F: SieveFamily, guard: Guard = DEFAULT_GUARD) -> Topology:
    """The smallest topology in which every sieve of ``F`` covers."""
    return l_operator(r_operator(pullback_stabilize(F), guard), guard)


def generate_topology_oracle(F: SieveFamily, guard: Guard = DEFAULT_GUARD) -> Topology:
    """Same result as :func:`generate_topology`, by saturating under the proof rules."""
    from .proofsys import saturate

    return saturate(F, guard=guard).topology


def join(j1: Topology, j2: Topology, guard: Guard = DEFAULT_GUARD) -> Topology:
    return generate_topology(family_union(j1, j2), guard)


# -- Heyting implication ----------------------------------------------------------


def implication(j1: Topology, j2: Topology, guard: Guard = DEFAULT_GUARD) -> Topology:
    cat = _same_cat(j1, j2)
    universe = sieve_universe(cat, guard)
    # Z ranges over sieves that are j1-covering, j2-closed and not maximal
    blockers = {
        d: [z.members for z in j1[d] if is_closed_sieve(z, j2) and cat.identity[d] not in z.members]
        for d in cat.objects
    }
    sel = {}
    for c in cat.objects:
        sel[c] = [
            s for s in universe[c]
            if not any(
                pullback(cat, f, s).members <= z
                for f in cat.arrows_into(c)
                for z in blockers[cat.dom(f)]
            )
        ]
    return _trusted(Topology, cat, sel)


def negation(j: Topology, guard: Guard = DEFAULT_GUARD) -> Topology:
    """Pseudocomplement, as ``j => bottom``."""
    return implication(j, bottom(j.cat), guard)


def pseudocomplement_formula(j: Topology, guard: Guard = DEFAULT_GUARD) -> Topology:
    """Pseudocomplement by its own closed formula (no closedness test on Z)."""
    cat = j.cat
    universe = sieve_universe(cat, guard)
    sel = {}
    for c in cat.objects:
        keep = []
        for s in universe[c]:
            ok = True
            for f in cat.arrows_into(c):
                d = cat.dom(f)
                fs = pullback(cat, f, s)
                for z in j[d]:
                    if fs.members <= z.members and z != maximal_sieve(cat, d):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                keep.append(s)
        sel[c] = keep
    return _trusted(Topology, cat, sel)


# -- enumeration ------------------------------------------------------------------


def topology_key(j: SieveFamily) -> tuple:
    cat = j.cat
    return (
        j.size_vector(),
        tuple(tuple(sorted(sieve_key(cat, s) for s in j[c])) for c in cat.objects),
    )


def _upsets(sieves: tuple[Sieve, ...]) -> list[frozenset[Sieve]]:
    """Up-closed subsets of the sieve poset that contain the top sieve."""
    order = sorted(sieves, key=lambda s: -len(s.members))
    above = [[t for t in order if t.members > s.members] for s in order]
    out: list[frozenset[Sieve]] = []

    def rec(i: int, chosen: list[Sieve], chosen_set: set[Sieve]) -> None:
        if i == len(order):
            out.append(frozenset(chosen))
            return
        s = order[i]
        if all(t in chosen_set for t in above[i]):
            chosen.append(s)
            chosen_set.add(s)
            rec(i + 1, chosen, chosen_set)
            chosen.pop()
            chosen_set.discard(s)
        if i > 0:
            rec(i + 1, chosen, chosen_set)

    if order:
        rec(0, [], set())
    return out


def _stable_between(cat: FinCat, assign: dict[str, frozenset[Sieve]], c: str, d: str) -> bool:
    for f in cat.hom(d, c):
        for s in assign[c]:
            if pullback(cat, f, s) not in assign[d]:
                return False
    return True


def _transitive(cat: FinCat, assign: dict[str, frozenset[Sieve]], universe) -> bool:
    for c in cat.objects:
        for s in assign[c]:
            for r in universe[c]:
                if r not in assign[c] and all(pullback(cat, f, r) in assign[cat.dom(f)] for f in s.members):
                    return False
    return True


def enumerate_topologies(cat: FinCat, guard: Guard = DEFAULT_GUARD) -> list[Topology]:
    """Every topology on ``cat``, sorted by :func:`topology_key`.

    Each object's covering set is an up-set containing the maximal sieve;
    objects are assigned in canonical order and stability is checked
    against the objects assigned so far, transitivity at the leaves.
    """
    universe = sieve_universe(cat, guard)
    choices = {c: _upsets(universe[c]) for c in cat.objects}
    objects = cat.objects
    found: list[Topology] = []
    assign: dict[str, frozenset[Sieve]] = {}

    def rec(k: int) -> None:
        if k == len(objects):
            if _transitive(cat, assign, universe):
                found.append(_trusted(Topology, cat, dict(assign)))
            return
        c = objects[k]
        for up in choices[c]:
            assign[c] = up
            if all(
                _stable_between(cat, assign, c, d) and _stable_between(cat, assign, d, c)
                for d in objects[: k + 1]
            ):
                rec(k + 1)
        del assign[c]

    rec(0)
    found.sort(key=topology_key)
    return found


def hasse(lattice: list[SieveFamily]) -> list[tuple[int, int]]:
    """Covering pairs ``(i, j)``: ``lattice[i] < lattice[j]`` with nothing between."""
    n = len(lattice)
    lt = [[i != j and leq(lattice[i], lattice[j]) and lattice[i] != lattice[j] for j in range(n)] for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(n):
            if lt[i][j] and not any(lt[i][k] and lt[k][j] for k in range(n)):
                edges.append((i, j))
    return edges


def leq_matrix(lattice: list[SieveFamily]) -> list[list[bool]]:
    return [[leq(a, b) for b in lattice] for a in lattice]


# -- serialization ----------------------------------------------------------------


def topology_to_json(j: SieveFamily) -> dict:
    cat = j.cat
    return {
        "covers": {
            c: [cat.sort_arrows(s.members) for s in sorted(j[c], key=lambda s: sieve_key(cat, s))]
            for c in cat.objects
        }
    }


def family_from_json(cat: FinCat, doc) -> SieveFamily:
    if isinstance(doc, dict) and "covers" in doc:
        doc = doc["covers"]
    if isinstance(doc, list):
        return SieveFamily.of(cat, (sieve_from_json(cat, s) for s in doc))
    if not isinstance(doc, dict):
        raise NotASieve('a family must be {"covers": {object: [[arrows], ...]}} or a list of sieves', doc)
    sel = {}
    for c, lists in doc.items():
        cat.check_object(c)
        if not isinstance(lists, list):
            raise NotASieve(f"covers of {c!r} must be a list of arrow lists", c)
        sel[c] = [sieve_from_json(cat, {"on": c, "arrows": arrows}) for arrows in lists]
    return SieveFamily(cat, sel)


def topology_from_json(cat: FinCat, doc, guard: Guard = DEFAULT_GUARD) -> Topology:
    return as_topology(family_from_json(cat, doc), guard)
