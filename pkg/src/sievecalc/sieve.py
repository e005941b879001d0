"""Sieves and presieves on a finite category."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import GuardExceeded, NotASieve, ObjectMismatch
from .fincat import FinCat


@dataclass(frozen=True)
class Guard:
    """Size bounds for anything that quantifies over every sieve."""

    max_arrows_into: int = 22
    max_sieves: int = 4096


DEFAULT_GUARD = Guard()


@dataclass(frozen=True)
class Presieve:
    on: str
    members: frozenset[str]

    def __init__(self, on: str, members: Iterable[str] = ()):
        object.__setattr__(self, "on", on)
        object.__setattr__(self, "members", frozenset(members))


@dataclass(frozen=True)
class Sieve:
    on: str
    members: frozenset[str]

    def __init__(self, on: str, members: Iterable[str] = ()):
        object.__setattr__(self, "on", on)
        object.__setattr__(self, "members", frozenset(members))

    def __contains__(self, f: str) -> bool:
        return f in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        return f"Sieve({self.on!r}, {sorted(self.members)})"


def _check_members(cat: FinCat, on: str, members: Iterable[str]) -> None:
    cat.check_object(on)
    for f in members:
        if cat.cod(f) != on:
            raise ObjectMismatch(f"arrow {f!r} does not have codomain {on!r}", f)


def is_sieve(cat: FinCat, s: Sieve) -> bool:
    for g in s.members:
        for h in cat.arrows_into(cat.dom(g)):
            if cat.compose(g, h) not in s.members:
                return False
    return True


def make_sieve(cat: FinCat, on: str, members: Iterable[str]) -> Sieve:
    """Validated constructor."""
    s = Sieve(on, members)
    _check_members(cat, on, s.members)
    if not is_sieve(cat, s):
        raise NotASieve(f"{sorted(s.members)} on {on!r} is not closed under precomposition", sieve_to_json(cat, s))
    return s


def maximal_sieve(cat: FinCat, c: str) -> Sieve:
    return Sieve(c, cat.arrows_into(c))


def empty_sieve(cat: FinCat, c: str) -> Sieve:
    cat.check_object(c)
    return Sieve(c)


def is_maximal(cat: FinCat, s: Sieve) -> bool:
    return cat.identity[s.on] in s.members


def generate_sieve(cat: FinCat, p: Presieve) -> Sieve:
    """All arrows factoring through a member of ``p``."""
    _check_members(cat, p.on, p.members)
    members = set()
    for g in p.members:
        for h in cat.arrows_into(cat.dom(g)):
            members.add(cat.compose(g, h))
    return Sieve(p.on, members)


def principal_sieve(cat: FinCat, f: str) -> Sieve:
    return generate_sieve(cat, Presieve(cat.cod(f), (f,)))


def pullback(cat: FinCat, g: str, s: Sieve) -> Sieve:
    """``g*(s)``: the arrows ``h`` with ``g o h`` in ``s``."""
    memo = cat._cache.setdefault("pullback", {})
    key = (g, s)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if cat.cod(g) != s.on:
        raise ObjectMismatch(f"arrow {g!r} has codomain {cat.cod(g)!r}, sieve is on {s.on!r}", g)
    d = cat.dom(g)
    out = Sieve(d, (h for h in cat.arrows_into(d) if cat.compose(g, h) in s.members))
    memo[key] = out
    return out


def compose_sieves(cat: FinCat, s: Sieve, t: Mapping[str, Sieve]) -> Sieve:
    """The composite ``S * {T_f}``."""
    raw = set()
    for f in s.members:
        if f not in t:
            raise ObjectMismatch(f"no sieve assigned to member {f!r}", f)
        tf = t[f]
        if tf.on != cat.dom(f):
            raise ObjectMismatch(f"sieve assigned to {f!r} is on {tf.on!r}, expected {cat.dom(f)!r}", f)
        for g in tf.members:
            raw.add(cat.compose(f, g))
    return generate_sieve(cat, Presieve(s.on, raw))


def _same_object(a: Sieve, b: Sieve) -> None:
    if a.on != b.on:
        raise ObjectMismatch(f"sieves on different objects {a.on!r} and {b.on!r}", [a.on, b.on])


def sieve_leq(a: Sieve, b: Sieve) -> bool:
    _same_object(a, b)
    return a.members <= b.members


def sieve_union(a: Sieve, b: Sieve) -> Sieve:
    _same_object(a, b)
    return Sieve(a.on, a.members | b.members)


def sieve_intersection(a: Sieve, b: Sieve) -> Sieve:
    _same_object(a, b)
    return Sieve(a.on, a.members & b.members)


def sieve_key(cat: FinCat, s: Sieve) -> tuple:
    """Canonical sort key: size first, then sorted arrow positions."""
    return (len(s.members), tuple(sorted(cat.arrow_index(f) for f in s.members)))


def sort_sieves(cat: FinCat, sieves: Iterable[Sieve]) -> list[Sieve]:
    return sorted(sieves, key=lambda s: (cat.object_index(s.on),) + sieve_key(cat, s))


def all_sieves(cat: FinCat, c: str, guard: Guard = DEFAULT_GUARD) -> tuple[Sieve, ...]:
    """Every sieve on ``c`` in canonical order.

    Sieves are exactly the unions of principal sieves, so the search closes
    the empty sieve under "add one principal sieve".
    """
    into = cat.arrows_into(c)
    if len(into) > guard.max_arrows_into:
        raise GuardExceeded(
            f"object {c!r} has {len(into)} arrows into it (max_arrows_into={guard.max_arrows_into})",
            {"bound": "max_arrows_into", "object": c, "value": len(into)},
        )
    memo = cat._cache.setdefault("sieves", {})
    found = memo.get(c)
    if found is None:
        principals = [frozenset(principal_sieve(cat, f).members) for f in into]
        seen = {frozenset()}
        frontier = [frozenset()]
        while frontier:
            nxt = []
            for s in frontier:
                for p in principals:
                    u = s | p
                    if u not in seen:
                        seen.add(u)
                        nxt.append(u)
                        if len(seen) > guard.max_sieves:
                            raise GuardExceeded(
                                f"object {c!r} has more than {guard.max_sieves} sieves (max_sieves)",
                                {"bound": "max_sieves", "object": c},
                            )
            frontier = nxt
        found = tuple(sorted((Sieve(c, m) for m in seen), key=lambda s: sieve_key(cat, s)))
        memo[c] = found
    if len(found) > guard.max_sieves:
        raise GuardExceeded(
            f"object {c!r} has {len(found)} sieves (max_sieves={guard.max_sieves})",
            {"bound": "max_sieves", "object": c, "value": len(found)},
        )
    return found


def sieve_universe(cat: FinCat, guard: Guard = DEFAULT_GUARD) -> dict[str, tuple[Sieve, ...]]:
    """All sieves on all objects, refusing when the total exceeds the guard."""
    out = {}
    total = 0
    for c in cat.objects:
        out[c] = all_sieves(cat, c, guard)
        total += len(out[c])
        if total > guard.max_sieves:
            raise GuardExceeded(
                f"more than {guard.max_sieves} sieves in total (max_sieves)",
                {"bound": "max_sieves", "value": total},
            )
    return out


def sieve_to_json(cat: FinCat, s: Sieve) -> dict:
    return {"on": s.on, "arrows": cat.sort_arrows(s.members)}


def sieve_from_json(cat: FinCat, doc) -> Sieve:
    if not isinstance(doc, dict) or not isinstance(doc.get("on"), str) or not isinstance(doc.get("arrows"), list):
        raise NotASieve('a sieve must be an object {"on": <object>, "arrows": [...]}', doc)
    for f in doc["arrows"]:
        if not isinstance(f, str):
            raise NotASieve("sieve members must be arrow names", doc)
    return make_sieve(cat, doc["on"], doc["arrows"])
