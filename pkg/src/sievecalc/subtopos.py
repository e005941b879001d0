"""Subterminals as ideals of objects and the subtoposes attached to them.

A subterminal of Sh(C, J) is represented by the set of objects where it is
inhabited: a downward-closed set of objects which is also closed under
J-covering by its own sieve ``Z(c)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .errors import ConsistencyError, GuardExceeded, NotAJIdeal, PreconditionError
from .fincat import FinCat, full_subcategory
from .localop import closed_sieves, internal_and, internal_or
from .sieve import DEFAULT_GUARD, Guard, Sieve, maximal_sieve, pullback, sieve_universe
from .topology import (
    SieveFamily,
    Topology,
    as_topology,
    enumerate_topologies,
    join,
    leq,
    meet,
    sieve_closure,
    top,
)

MAX_IDEAL_OBJECTS = 20


@dataclass(frozen=True)
class Ideal:
    cat: FinCat
    objects: frozenset[str]

    def __init__(self, cat: FinCat, objects: Iterable[str]):
        objects = frozenset(objects)
        for c in objects:
            cat.check_object(c)
        object.__setattr__(self, "cat", cat)
        object.__setattr__(self, "objects", objects)

    def __contains__(self, c: str) -> bool:
        return c in self.objects

    def __repr__(self) -> str:
        return f"Ideal({self.cat.sort_objects(self.objects)})"

    def is_downward_closed(self) -> bool:
        return all(self.cat.dom(f) in self.objects for c in self.objects for f in self.cat.arrows_into(c))


@dataclass(frozen=True)
class JIdeal:
    underlying: Ideal
    topology: Topology

    @property
    def objects(self) -> frozenset[str]:
        return self.underlying.objects


def z_sieve(u: Ideal, c: str) -> Sieve:
    cat = u.cat
    return Sieve(c, (f for f in cat.arrows_into(c) if cat.dom(f) in u.objects))


def is_j_closed(u: Ideal, j: Topology) -> bool:
    return all(c in u.objects or z_sieve(u, c) not in j[c] for c in u.cat.objects)


def _ideal_key(u: Ideal) -> tuple:
    return (len(u.objects), tuple(sorted(u.cat.object_index(c) for c in u.objects)))


def ideals(cat: FinCat) -> list[Ideal]:
    n = len(cat.objects)
    if n > MAX_IDEAL_OBJECTS:
        raise GuardExceeded(f"ideal enumeration limited to {MAX_IDEAL_OBJECTS} objects", {"bound": "objects", "value": n})
    out = []
    for r in range(n + 1):
        for combo in itertools.combinations(cat.objects, r):
            u = Ideal(cat, combo)
            if u.is_downward_closed():
                out.append(u)
    out.sort(key=_ideal_key)
    return out


def j_ideals(j: Topology) -> list[JIdeal]:
    return [JIdeal(u, j) for u in ideals(j.cat) if is_j_closed(u, j)]


def as_j_ideal(j: Topology, u: Ideal | JIdeal | Iterable[str]) -> JIdeal:
    """Check that ``u`` is a J-ideal for ``j`` and wrap it."""
    if isinstance(u, JIdeal):
        u = u.underlying
    elif not isinstance(u, Ideal):
        u = Ideal(j.cat, u)
    if u.cat != j.cat:
        raise NotAJIdeal("ideal lives on a different category")
    objs = j.cat.sort_objects(u.objects)
    if not u.is_downward_closed():
        raise NotAJIdeal("object set is not downward closed", {"objects": objs})
    for c in j.cat.objects:
        if c not in u.objects and z_sieve(u, c) in j[c]:
            raise NotAJIdeal(f"Z({c}) covers {c!r} but {c!r} is not in the ideal", {"objects": objs, "object": c})
    return JIdeal(u, j)


def zero_ideal(j: Topology) -> JIdeal:
    """Objects covered by the empty sieve."""
    u = Ideal(j.cat, (c for c in j.cat.objects if Sieve(c) in j[c]))
    if not (u.is_downward_closed() and is_j_closed(u, j)):
        raise ConsistencyError("zero ideal is not a J-ideal", {"objects": j.cat.sort_objects(u.objects)})
    return JIdeal(u, j)


# -- open, closed, quasi-closed ------------------------------------------------------


def open_part(u: Ideal, guard: Guard = DEFAULT_GUARD) -> Topology:
    """``R`` covers ``c`` iff ``R`` contains ``Z(c)``; checked to be a topology."""
    cat = u.cat
    universe = sieve_universe(cat, guard)
    sel = {c: [r for r in universe[c] if z_sieve(u, c).members <= r.members] for c in cat.objects}
    return as_topology(SieveFamily(cat, sel, check=False), guard)


def open_topology(j: Topology, u, guard: Guard = DEFAULT_GUARD) -> Topology:
    ju = as_j_ideal(j, u)
    return join(j, open_part(ju.underlying, guard), guard)


def closed_topology(j: Topology, u, guard: Guard = DEFAULT_GUARD) -> Topology:
    """``R`` covers ``c`` iff ``Z(c) u R`` is j-covering."""
    ju = as_j_ideal(j, u)
    cat = j.cat
    universe = sieve_universe(cat, guard)
    sel = {}
    for c in cat.objects:
        z = z_sieve(ju.underlying, c).members
        sel[c] = [r for r in universe[c] if Sieve(c, z | r.members) in j[c]]
    return Topology(cat, sel, check=False)


def quasiclosed_part(u: Ideal, guard: Guard = DEFAULT_GUARD) -> Topology:
    cat = u.cat
    universe = sieve_universe(cat, guard)
    zs = {c: z_sieve(u, c) for c in cat.objects}
    sel = {}
    for c in cat.objects:
        keep = []
        for r in universe[c]:
            if all(
                f in zs[c].members or not pullback(cat, f, r).members <= zs[cat.dom(f)].members
                for f in cat.arrows_into(c)
            ):
                keep.append(r)
        sel[c] = keep
    return Topology(cat, sel, check=False)


def quasiclosed_topology(j: Topology, u, guard: Guard = DEFAULT_GUARD) -> Topology:
    ju = as_j_ideal(j, u)
    return join(j, quasiclosed_part(ju.underlying, guard), guard)


def booleanization(j: Topology, guard: Guard = DEFAULT_GUARD) -> Topology:
    return quasiclosed_topology(j, zero_ideal(j), guard)


# -- dense-closed factorization, skeletal inclusions ------------------------------


def _require_below(jp: Topology, j: Topology) -> None:
    if not leq(j, jp):
        raise PreconditionError("the base topology must be contained in the other one")


def ext(jp: Topology, j: Topology) -> JIdeal:
    """Objects covered by the empty sieve in ``jp``, as a j-ideal."""
    _require_below(jp, j)
    u = Ideal(j.cat, (c for c in j.cat.objects if Sieve(c) in jp[c]))
    if not (u.is_downward_closed() and is_j_closed(u, j)):
        raise ConsistencyError("ext is not a J-ideal", {"objects": j.cat.sort_objects(u.objects)})
    return JIdeal(u, j)


def dense_closed_factorization(jp: Topology, j: Topology, guard: Guard = DEFAULT_GUARD) -> Topology:
    """The intermediate topology: closed over ``j``, with ``jp`` dense over it."""
    return closed_topology(j, ext(jp, j), guard)


def is_dense(jp: Topology, j: Topology) -> bool:
    return ext(jp, j).objects == zero_ideal(j).objects


def is_skeletal(jp: Topology, j: Topology) -> bool:
    """Skeletality test on the full subcategory of objects not covered by the empty sieve.

    For each such ``c``: if ``Z(c)`` (arrows of the subcategory whose domain
    is covered by the empty sieve in ``jp``) is non-empty after pulling back
    along every arrow of the subcategory into ``c``, then the empty sieve
    must cover ``c`` in ``jp``.
    """
    _require_below(jp, j)
    zero = zero_ideal(j).objects
    sub = full_subcategory(j.cat, (c for c in j.cat.objects if c not in zero))
    covered_by_empty = {c for c in sub.objects if Sieve(c) in jp[c]}
    for c in sub.objects:
        z = Sieve(c, (f for f in sub.arrows_into(c) if sub.dom(f) in covered_by_empty))
        stably_nonempty = all(pullback(sub, g, z).members for g in sub.arrows_into(c))
        if stably_nonempty and c not in covered_by_empty:
            return False
    return True


# -- Boolean, two-valued, degenerate, atoms ---------------------------------------


def is_boolean(j: Topology, guard: Guard = DEFAULT_GUARD) -> bool:
    return booleanization(j, guard) == j


def is_two_valued(j: Topology) -> bool:
    return len(j_ideals(j)) == 2


def is_degenerate(j: Topology, guard: Guard = DEFAULT_GUARD) -> bool:
    return j == top(j.cat, guard)


def closed_sieves_complemented(j: Topology, guard: Guard = DEFAULT_GUARD) -> bool:
    """Diagnostic Boolean test on the lattices of j-closed sieves.

    Every closed sieve must have a closed complement: meet equal to the
    closure of the empty sieve, closure of the union maximal.
    """
    cat = j.cat
    for c in cat.objects:
        closed = closed_sieves(j, c, guard)
        bot = sieve_closure(Sieve(c), j)
        m = maximal_sieve(cat, c)
        for s in closed:
            if not any(
                internal_and(cat, c, s, t) == bot and sieve_closure(internal_or(cat, c, s, t), j) == m
                for t in closed
            ):
                return False
    return True


def atoms(cat: FinCat, j: Topology, guard: Guard = DEFAULT_GUARD) -> list[Topology]:
    """Topologies just below the top in the interval above ``j``.

    Cross-checked against the two-valued Boolean topologies of the same
    interval; a mismatch raises ConsistencyError.
    """
    if j.cat != cat:
        raise PreconditionError("topology lives on a different category")
    lattice = enumerate_topologies(cat, guard)
    t = top(cat, guard)
    interval = [k for k in lattice if leq(j, k)]
    found = [k for k in interval if k != t and all(k2 in (k, t) for k2 in interval if leq(k, k2))]
    filtered = [k for k in interval if is_boolean(k, guard) and is_two_valued(k)]
    if found != filtered:
        raise ConsistencyError(
            "atoms of the interval differ from its two-valued Boolean elements",
            {"atoms": len(found), "boolean_two_valued": len(filtered)},
        )
    return found


def complements_check(j: Topology, u, guard: Guard = DEFAULT_GUARD) -> bool:
    o = open_topology(j, u, guard)
    c = closed_topology(j, u, guard)
    return meet(o, c) == j and join(o, c, guard) == top(j.cat, guard)


def ideal_to_json(u: Ideal | JIdeal) -> dict:
    if isinstance(u, JIdeal):
        u = u.underlying
    return {"objects": u.cat.sort_objects(u.objects)}


def ideal_from_json(cat: FinCat, doc) -> Ideal:
    if isinstance(doc, dict):
        doc = doc.get("objects")
    if not isinstance(doc, list) or not all(isinstance(c, str) for c in doc):
        raise PreconditionError('an ideal must be {"objects": [...]}', doc)
    return Ideal(cat, doc)


__all__ = [
    "Ideal", "JIdeal", "ideals", "j_ideals", "z_sieve", "is_j_closed", "as_j_ideal", "zero_ideal",
    "open_part", "open_topology", "closed_topology", "quasiclosed_part", "quasiclosed_topology",
    "booleanization", "ext", "dense_closed_factorization", "is_dense", "is_skeletal",
    "is_boolean", "is_two_valued", "is_degenerate", "closed_sieves_complemented", "atoms",
    "complements_check", "ideal_to_json", "ideal_from_json",
]
