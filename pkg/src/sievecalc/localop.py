"""Local operators as closure maps on sieves, and their relativizations.

A topology J acts on Omega(c) = {sieves on c} by its closure map; this is
the local operator of J, computed on demand rather than tabulated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import CategoryMismatch, ObjectMismatch, RelativizationError
from .fincat import FinCat
from .sieve import DEFAULT_GUARD, Guard, Sieve, all_sieves, maximal_sieve, pullback, sieve_to_json
from .topology import Topology, is_closed_sieve, join, sieve_closure


@dataclass(frozen=True)
class OmegaPoint:
    at: str
    sieve: Sieve

    def __post_init__(self):
        if self.sieve.on != self.at:
            raise ObjectMismatch(f"sieve on {self.sieve.on!r} is not an element of Omega({self.at!r})", self.at)


def classify(j: Topology, p: OmegaPoint) -> Sieve:
    """Apply the local operator of ``j`` at stage ``p.at``."""
    j.cat.check_object(p.at)
    return sieve_closure(p.sieve, j)


def _pair(c: str, s: Sieve, t: Sieve) -> None:
    if s.on != c or t.on != c:
        raise ObjectMismatch(f"expected two sieves on {c!r}", c)


def internal_and(cat: FinCat, c: str, s: Sieve, t: Sieve) -> Sieve:
    _pair(c, s, t)
    return Sieve(c, s.members & t.members)


def internal_or(cat: FinCat, c: str, s: Sieve, t: Sieve) -> Sieve:
    _pair(c, s, t)
    out = []
    for f in cat.arrows_into(c):
        d = cat.dom(f)
        if pullback(cat, f, s).members | pullback(cat, f, t).members == maximal_sieve(cat, d).members:
            out.append(f)
    return Sieve(c, out)


def internal_implies(cat: FinCat, c: str, s: Sieve, t: Sieve) -> Sieve:
    _pair(c, s, t)
    return Sieve(c, (f for f in cat.arrows_into(c) if pullback(cat, f, s).members <= pullback(cat, f, t).members))


def closed_sieves(j: Topology, c: str, guard: Guard = DEFAULT_GUARD) -> list[Sieve]:
    return [s for s in all_sieves(j.cat, c, guard) if is_closed_sieve(s, j)]


def _closed_points(j: Topology, guard: Guard) -> Iterator[tuple[str, Sieve]]:
    for c in j.cat.objects:
        for s in closed_sieves(j, c, guard):
            yield c, s


def relativization_witness(k: Topology, j: Topology, guard: Guard = DEFAULT_GUARD) -> tuple[str, Sieve] | None:
    """First j-closed sieve whose k-closure is not j-closed, else None."""
    if k.cat != j.cat:
        raise CategoryMismatch("operands live on different categories")
    for c, s in _closed_points(j, guard):
        if not is_closed_sieve(sieve_closure(s, k), j):
            return c, s
    return None


def relativization_exists(k: Topology, j: Topology, guard: Guard = DEFAULT_GUARD) -> bool:
    return relativization_witness(k, j, guard) is None


@dataclass(frozen=True)
class RelativizedOperator:
    base: Topology
    action: dict[tuple[str, Sieve], Sieve]

    def __call__(self, c: str, s: Sieve) -> Sieve:
        return self.action[(c, s)]


def relativize(k: Topology, j: Topology, guard: Guard = DEFAULT_GUARD) -> RelativizedOperator:
    """The operator induced by ``k`` on j-closed sieves.

    Raises RelativizationError naming the first (c, S) in canonical order
    whose k-closure leaves the j-closed sieves.
    """
    w = relativization_witness(k, j, guard)
    if w is not None:
        c, s = w
        image = sieve_closure(s, k)
        raise RelativizationError(
            f"the closure of a {c}-sieve under the first topology is not closed for the second",
            {"object": c, "sieve": sieve_to_json(j.cat, s), "image": sieve_to_json(j.cat, image)},
        )
    action = {(c, s): sieve_closure(s, k) for c, s in _closed_points(j, guard)}
    return RelativizedOperator(j, action)


def check_relativization_theorem(k: Topology, j: Topology, guard: Guard = DEFAULT_GUARD) -> bool:
    """Sieve-level form of the relativization theorem for the pair (k, j).

    For every j-closed S on c: the relativized action agrees with the
    k-closure, and S is (k v j)-covering exactly when the j-closure of its
    relativized image is maximal.
    """
    rel = relativize(k, j, guard)
    kj = join(k, j, guard)
    cat = j.cat
    for (c, s), image in rel.action.items():
        if image != classify(k, OmegaPoint(c, s)):
            return False
        m = maximal_sieve(cat, c)
        lhs = classify(kj, OmegaPoint(c, s)) == m
        rhs = classify(j, OmegaPoint(c, image)) == m
        if lhs != rhs:
            return False
    return True


def join_relativization_agrees(k: Topology, j: Topology, guard: Guard = DEFAULT_GUARD) -> bool:
    """``k v j`` relativizes at ``j`` to the same operator as ``k``."""
    rel = relativize(k, j, guard)
    return relativize(join(k, j, guard), j, guard).action == rel.action
