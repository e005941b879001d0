"""Finite categories given by an explicit composition table."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    CategoryParseError,
    CategoryValidationError,
    UnknownArrow,
    UnknownFixture,
    UnknownObject,
)


@dataclass(frozen=True)
class Arrow:
    name: str
    dom: str
    cod: str


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple
    message: str

    def to_json(self) -> dict:
        return {"law": self.law, "witness": list(self.witness), "message": self.message}


class FinCat:
    """A finite category.

    ``compose`` maps a pair ``(g, f)`` with ``dom(g) == cod(f)`` to the
    name of ``g o f``. The constructor does not check the category laws;
    use :func:`validate` (or :func:`load_category`, which does).
    """

    def __init__(
        self,
        objects: Iterable[str],
        arrows: Iterable[Arrow],
        identity: Mapping[str, str],
        compose: Mapping[tuple[str, str], str],
    ):
        self.objects: tuple[str, ...] = tuple(objects)
        self.arrows: tuple[Arrow, ...] = tuple(arrows)
        self.identity: dict[str, str] = dict(identity)
        self.compose_table: dict[tuple[str, str], str] = dict(compose)

        self._arrow = {a.name: a for a in self.arrows}
        self._index = {a.name: i for i, a in enumerate(self.arrows)}
        self._obj_index = {c: i for i, c in enumerate(self.objects)}
        self._into: dict[str, tuple[str, ...]] = {
            c: tuple(a.name for a in self.arrows if a.cod == c) for c in self.objects
        }
        self._out: dict[str, tuple[str, ...]] = {
            c: tuple(a.name for a in self.arrows if a.dom == c) for c in self.objects
        }
        self._identities = frozenset(self.identity.values())
        self._key = (
            self.objects,
            self.arrows,
            tuple(sorted(self.identity.items())),
            tuple(sorted(self.compose_table.items())),
        )
        self._hash = hash(self._key)
        # memo slots used by the sieve and topology modules
        self._cache: dict = {}

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FinCat):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"FinCat(objects={list(self.objects)}, arrows={[a.name for a in self.arrows]})"

    # -- queries -----------------------------------------------------------

    def arrow(self, name: str) -> Arrow:
        try:
            return self._arrow[name]
        except KeyError:
            raise UnknownArrow(f"unknown arrow {name!r}", name) from None

    def dom(self, name: str) -> str:
        return self.arrow(name).dom

    def cod(self, name: str) -> str:
        return self.arrow(name).cod

    def has_object(self, c: str) -> bool:
        return c in self._obj_index

    def check_object(self, c: str) -> None:
        if c not in self._obj_index:
            raise UnknownObject(f"unknown object {c!r}", c)

    def id(self, c: str) -> str:
        self.check_object(c)
        return self.identity[c]

    def is_identity(self, name: str) -> bool:
        return name in self._identities

    def compose(self, g: str, f: str) -> str:
        """``g o f``."""
        try:
            return self.compose_table[(g, f)]
        except KeyError:
            if self.dom(g) != self.cod(f):
                raise ValueError(f"arrows {g!r} and {f!r} are not composable") from None
            raise

    def arrows_into(self, c: str) -> tuple[str, ...]:
        self.check_object(c)
        return self._into[c]

    def arrows_out(self, c: str) -> tuple[str, ...]:
        self.check_object(c)
        return self._out[c]

    def arrow_index(self, name: str) -> int:
        return self._index[name]

    def object_index(self, c: str) -> int:
        return self._obj_index[c]

    def hom(self, d: str, c: str) -> tuple[str, ...]:
        return tuple(f for f in self.arrows_into(c) if self._arrow[f].dom == d)

    def sort_arrows(self, names: Iterable[str]) -> list[str]:
        return sorted(names, key=self._index.__getitem__)

    def sort_objects(self, names: Iterable[str]) -> list[str]:
        return sorted(names, key=self._obj_index.__getitem__)


def validate(cat: FinCat) -> list[Violation]:
    """Check every category law, returning one entry per violation."""
    report: list[Violation] = []
    seen_objects: set[str] = set()
    for c in cat.objects:
        if not c:
            report.append(Violation("object name", (c,), "empty object name"))
        if c in seen_objects:
            report.append(Violation("object name", (c,), f"duplicate object {c!r}"))
        seen_objects.add(c)
    seen_arrows: set[str] = set()
    for a in cat.arrows:
        if not a.name:
            report.append(Violation("arrow name", (a.name,), "empty arrow name"))
        if a.name in seen_arrows:
            report.append(Violation("arrow name", (a.name,), f"duplicate arrow {a.name!r}"))
        seen_arrows.add(a.name)
        for end in (a.dom, a.cod):
            if end not in seen_objects:
                report.append(
                    Violation("arrow endpoint", (a.name,), f"arrow {a.name!r} uses unknown object {end!r}")
                )
    if report:
        return report

    arrows = {a.name: a for a in cat.arrows}
    for c in cat.objects:
        i = cat.identity.get(c)
        if i is None:
            report.append(Violation("identity", (c,), f"object {c!r} has no identity"))
        elif i not in arrows or arrows[i].dom != c or arrows[i].cod != c:
            report.append(Violation("identity", (c,), f"identity {i!r} of {c!r} is not an endo-arrow of {c!r}"))
    if report:
        return report

    for (g, f), gf in cat.compose_table.items():
        if g not in arrows or f not in arrows or gf not in arrows:
            report.append(Violation("composition", (g, f, gf), f"composition {g} o {f} = {gf} names an unknown arrow"))
        elif arrows[g].dom != arrows[f].cod:
            report.append(Violation("composition", (g, f, gf), f"non-composable pair ({g}, {f})"))
        elif arrows[gf].dom != arrows[f].dom or arrows[gf].cod != arrows[g].cod:
            report.append(
                Violation(
                    "composition", (g, f, gf),
                    f"{g} o {f} = {gf} has type {arrows[gf].dom}->{arrows[gf].cod}, "
                    f"expected {arrows[f].dom}->{arrows[g].cod}",
                )
            )
    for g in cat.arrows:
        for f in cat.arrows:
            if g.dom == f.cod and (g.name, f.name) not in cat.compose_table:
                report.append(
                    Violation("composition", (g.name, f.name), f"missing composition {g.name} o {f.name}")
                )
    if report:
        return report

    comp = cat.compose_table
    for f in cat.arrows:
        if comp[(cat.identity[f.cod], f.name)] != f.name or comp[(f.name, cat.identity[f.dom])] != f.name:
            report.append(Violation("identity law", (f.name,), f"identity law fails for {f.name!r}"))
    for f in cat.arrows:
        for g in cat.arrows:
            if g.dom != f.cod:
                continue
            gf = comp[(g.name, f.name)]
            for h in cat.arrows:
                if h.dom != g.cod:
                    continue
                if comp[(h.name, gf)] != comp[(comp[(h.name, g.name)], f.name)]:
                    report.append(
                        Violation(
                            "associativity", (h.name, g.name, f.name),
                            f"({h.name} o {g.name}) o {f.name} != {h.name} o ({g.name} o {f.name})",
                        )
                    )
    return report


def build_category(
    objects: Iterable[str],
    arrows: Iterable[tuple[str, str, str]],
    compose: Iterable[tuple[str, str, str]] = (),
    identities: Mapping[str, str] | None = None,
    check: bool = True,
) -> FinCat:
    """Assemble a category, synthesizing ``1_<object>`` identities.

    ``arrows`` are ``(name, dom, cod)`` triples for the non-identity arrows
    (identities listed there are recognized when they are also named in
    ``identities`` or follow the ``1_<object>`` convention). ``compose``
    holds ``(g, f, gf)`` triples; compositions with identities are filled in.
    Canonical arrow order is: identities in object order, then the declared
    arrows in declaration order.
    """
    objects = list(objects)
    identities = dict(identities or {})
    declared = [Arrow(*a) for a in arrows]
    by_name = {a.name: a for a in declared}
    for c in objects:
        if c in identities:
            continue
        name = f"1_{c}"
        a = by_name.get(name)
        if a is None or (a.dom == c and a.cod == c):
            identities[c] = name
    id_arrows = []
    for c in objects:
        name = identities.get(c)
        if name is None:
            continue
        a = by_name.get(name)
        id_arrows.append(a if a is not None else Arrow(name, c, c))
    id_names = {a.name for a in id_arrows}
    all_arrows = id_arrows + [a for a in declared if a.name not in id_names]

    table: dict[tuple[str, str], str] = {}
    conflicts: list[Violation] = []
    for g, f, gf in compose:
        prev = table.get((g, f))
        if prev is not None and prev != gf:
            conflicts.append(Violation("composition", (g, f, gf), f"conflicting entries for {g} o {f}: {prev} and {gf}"))
        table[(g, f)] = gf
    for a in all_arrows:
        if a.cod in identities:
            table.setdefault((identities[a.cod], a.name), a.name)
        if a.dom in identities:
            table.setdefault((a.name, identities[a.dom]), a.name)
    cat = FinCat(objects, all_arrows, identities, table)
    if check:
        report = conflicts + validate(cat)
        if report:
            v = report[0]
            raise CategoryValidationError(
                f"{v.law}: {v.message}", {"violations": [r.to_json() for r in report]}
            )
    return cat


def load_category(source: str) -> FinCat:
    """Parse and validate a category from its JSON text."""
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise CategoryParseError(exc.msg, exc.lineno, exc.colno) from None
    return category_from_json(doc)


def category_from_json(doc) -> FinCat:
    if not isinstance(doc, dict):
        raise CategoryParseError("category document must be a JSON object")
    objects = doc.get("objects")
    if not isinstance(objects, list) or not all(isinstance(o, str) for o in objects):
        raise CategoryParseError('"objects" must be an array of strings')
    raw_arrows = doc.get("arrows", [])
    if not isinstance(raw_arrows, list):
        raise CategoryParseError('"arrows" must be an array')
    arrows = []
    for i, a in enumerate(raw_arrows):
        if not isinstance(a, dict) or not all(isinstance(a.get(k), str) for k in ("name", "dom", "cod")):
            raise CategoryParseError(f'arrow #{i} must be an object with string "name", "dom", "cod"')
        arrows.append((a["name"], a["dom"], a["cod"]))
    raw_compose = doc.get("compose", [])
    if not isinstance(raw_compose, list):
        raise CategoryParseError('"compose" must be an array')
    compose = []
    for i, t in enumerate(raw_compose):
        if not isinstance(t, list) or len(t) != 3 or not all(isinstance(x, str) for x in t):
            raise CategoryParseError(f"compose entry #{i} must be a triple [g, f, gf] of strings")
        compose.append(tuple(t))
    identities = doc.get("identities")
    if identities is not None and (
        not isinstance(identities, dict) or not all(isinstance(v, str) for v in identities.values())
    ):
        raise CategoryParseError('"identities" must map objects to arrow names')
    return build_category(objects, arrows, compose, identities)


def category_to_json(cat: FinCat) -> dict:
    ids = set(cat.identity.values())
    doc = {
        "objects": list(cat.objects),
        "arrows": [{"name": a.name, "dom": a.dom, "cod": a.cod} for a in cat.arrows if a.name not in ids],
        "compose": [
            [g, f, gf]
            for (g, f), gf in sorted(
                cat.compose_table.items(), key=lambda kv: (cat.arrow_index(kv[0][0]), cat.arrow_index(kv[0][1]))
            )
            if g not in ids and f not in ids
        ],
    }
    if any(cat.identity[c] != f"1_{c}" for c in cat.objects):
        doc["identities"] = dict(cat.identity)
    return doc


def full_subcategory(cat: FinCat, keep: Iterable[str]) -> FinCat:
    keep = set(keep)
    for c in keep:
        cat.check_object(c)
    objects = [c for c in cat.objects if c in keep]
    arrows = [a for a in cat.arrows if a.dom in keep and a.cod in keep]
    names = {a.name for a in arrows}
    table = {k: v for k, v in cat.compose_table.items() if k[0] in names and k[1] in names}
    return FinCat(objects, arrows, {c: cat.identity[c] for c in objects}, table)


def arrows_into(cat: FinCat, c: str) -> list[str]:
    return list(cat.arrows_into(c))


_FIXTURES = {
    "C1": dict(objects=["*"], arrows=[]),
    "C2": dict(objects=["a", "b"], arrows=[("f", "a", "b")]),
    "D2": dict(objects=["a", "b"], arrows=[]),
    "M2": dict(objects=["*"], arrows=[("e", "*", "*")], compose=[("e", "e", "e")]),
    "SPAN": dict(objects=["a", "b", "c"], arrows=[("p", "a", "b"), ("q", "a", "c")]),
}

FIXTURE_NAMES = tuple(_FIXTURES)


def builtin(name: str) -> FinCat:
    try:
        spec = _FIXTURES[name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; expected one of {', '.join(_FIXTURES)}", name) from None
    return build_category(**spec)


def empty_category() -> FinCat:
    return FinCat((), (), {}, {})
