"""Derivations of covering sieves from axioms.

Judgements are sieves. Axioms are the maximal sieves and the sieves of an
axiom family; the rules are

    stability       R  |-  f*(R)
    transitivity    Z, {f*(R) | f in Z}  |-  R        (Z, R on the same object)

The set of derivable sieves is the topology generated by the axioms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import MalformedDerivation, UnknownArrow, UnknownObject
from .fincat import FinCat
from .sieve import (
    DEFAULT_GUARD,
    Guard,
    Sieve,
    is_maximal,
    is_sieve,
    maximal_sieve,
    pullback,
    sieve_from_json,
    sieve_key,
    sieve_to_json,
    sieve_universe,
)
from .topology import SieveFamily, Topology, topology_to_json


class AxiomFamily:
    def __init__(self, cat: FinCat, axioms: Iterable[Sieve] = ()):
        self.cat = cat
        axioms = frozenset(axioms)
        for s in axioms:
            cat.check_object(s.on)
            if not is_sieve(cat, s):
                raise MalformedDerivation(f"axiom {sorted(s.members)} on {s.on!r} is not a sieve")
        self.axioms: frozenset[Sieve] = axioms

    @classmethod
    def coerce(cls, a: "AxiomFamily | SieveFamily") -> "AxiomFamily":
        if isinstance(a, AxiomFamily):
            return a
        return cls(a.cat, iter(a))

    def __contains__(self, s: Sieve) -> bool:
        return s in self.axioms

    def __repr__(self) -> str:
        return f"AxiomFamily({sorted((s.on, sorted(s.members)) for s in self.axioms)})"


# -- derivation trees -------------------------------------------------------------


@dataclass(frozen=True)
class AxiomMaximal:
    conclusion: Sieve


@dataclass(frozen=True)
class AxiomGiven:
    conclusion: Sieve


@dataclass(frozen=True)
class Stability:
    conclusion: Sieve
    arrow: str
    premise: "Derivation"


@dataclass(frozen=True)
class Transitivity:
    conclusion: Sieve
    z_premise: "Derivation"
    branch: Mapping[str, "Derivation"] = field(hash=False)


Derivation = Union[AxiomMaximal, AxiomGiven, Stability, Transitivity]


def depth(d: Derivation) -> int:
    if isinstance(d, (AxiomMaximal, AxiomGiven)):
        return 0
    if isinstance(d, Stability):
        return 1 + depth(d.premise)
    return 1 + max([depth(d.z_premise)] + [depth(b) for b in d.branch.values()])


def upward(cat: FinCat, below: Derivation, r: Sieve) -> Transitivity:
    """Derive ``r`` from a derivation of a smaller sieve on the same object.

    Transitivity with ``Z`` the smaller sieve: every ``f`` in ``Z`` lies in
    ``r``, so ``f*(r)`` is maximal and is discharged by an axiom.
    """
    z = below.conclusion
    if z.on != r.on or not z.members <= r.members:
        raise ValueError("upward pattern needs a subsieve on the same object")
    branch = {f: AxiomMaximal(pullback(cat, f, r)) for f in cat.sort_arrows(z.members)}
    return Transitivity(r, below, branch)


# -- saturation -------------------------------------------------------------------


@dataclass
class Saturation:
    """Result of closing an axiom family under the rules.

    ``provenance`` maps each derived sieve to the step that first produced
    it: ``("maximal",)``, ``("given",)``, ``("stability", arrow, premise)``,
    ``("transitivity", z)`` or ``("upward", smaller)``. ``round`` records the
    round in which it appeared, which bounds its derivation depth.
    """

    cat: FinCat
    axioms: AxiomFamily
    topology: Topology
    provenance: dict[Sieve, tuple]
    round: dict[Sieve, int]
    _memo: dict = field(default_factory=dict, repr=False)

    def derivation(self, s: Sieve) -> Derivation:
        if s not in self.provenance:
            raise KeyError(s)
        hit = self._memo.get(s)
        if hit is not None:
            return hit
        cat = self.cat
        step = self.provenance[s]
        kind = step[0]
        if kind == "maximal":
            d = AxiomMaximal(s)
        elif kind == "given":
            d = AxiomGiven(s)
        elif kind == "stability":
            d = Stability(s, step[1], self.derivation(step[2]))
        elif kind == "transitivity":
            z = step[1]
            d = Transitivity(
                s, self.derivation(z),
                {f: self.derivation(pullback(cat, f, s)) for f in cat.sort_arrows(z.members)},
            )
        else:
            d = upward(cat, self.derivation(step[1]), s)
        self._memo[s] = d
        return d


def saturate(
    a: AxiomFamily | SieveFamily,
    *,
    upward_rule: bool = False,
    guard: Guard = DEFAULT_GUARD,
) -> Saturation:
    """Least rule-closed set of sieves containing the axioms.

    Runs in rounds; every round applies all rules to the previous round's
    set only, so the round in which a sieve first appears is its minimal
    derivation depth. Within a round stability is tried before
    transitivity, and premises in canonical order. With ``upward_rule``
    an explicit "supersets of derivable sieves are derivable" rule is added.
    """
    a = AxiomFamily.coerce(a)
    cat = a.cat
    universe = sieve_universe(cat, guard)
    key = lambda s: sieve_key(cat, s)  # noqa: E731
    known: dict[str, set[Sieve]] = {c: set() for c in cat.objects}
    provenance: dict[Sieve, tuple] = {}
    rnd: dict[Sieve, int] = {}

    for c in cat.objects:
        m = maximal_sieve(cat, c)
        known[c].add(m)
        provenance[m] = ("maximal",)
        rnd[m] = 0
    for s in sorted(a.axioms, key=lambda s: (cat.object_index(s.on),) + key(s)):
        if s not in provenance:
            known[s.on].add(s)
            provenance[s] = ("given",)
            rnd[s] = 0

    k = 0
    while True:
        k += 1
        snapshot = {c: sorted(known[c], key=key) for c in cat.objects}
        snapset = {c: frozenset(known[c]) for c in cat.objects}
        new: dict[Sieve, tuple] = {}
        for c in cat.objects:
            for s in snapshot[c]:
                for f in cat.arrows_into(c):
                    p = pullback(cat, f, s)
                    if p not in snapset[p.on] and p not in new:
                        new[p] = ("stability", f, s)
        for c in cat.objects:
            for z in snapshot[c]:
                for r in universe[c]:
                    if r in snapset[c] or r in new:
                        continue
                    if all(pullback(cat, f, r) in snapset[cat.dom(f)] for f in z.members):
                        new[r] = ("transitivity", z)
        if upward_rule:
            for c in cat.objects:
                for t in snapshot[c]:
                    for r in universe[c]:
                        if r.members > t.members and r not in snapset[c] and r not in new:
                            new[r] = ("upward", t)
        if not new:
            break
        for s, step in new.items():
            known[s.on].add(s)
            provenance[s] = step
            rnd[s] = k

    topology = Topology(cat, known, check=False)
    return Saturation(cat, a, topology, provenance, rnd)


# -- proving and checking ---------------------------------------------------------


@dataclass(frozen=True)
class ProofFailure:
    """``target`` is not derivable; ``saturated`` is the full derivable set."""

    target: Sieve
    saturated: Topology

    def __bool__(self) -> bool:
        return False


def prove(target: Sieve, a: AxiomFamily | SieveFamily, guard: Guard = DEFAULT_GUARD) -> Derivation | ProofFailure:
    sat = saturate(a, guard=guard)
    if target in sat.topology:
        return sat.derivation(target)
    return ProofFailure(target, sat.topology)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    path: tuple[str, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _well_typed(cat: FinCat, s: Sieve, path: list[str]) -> None:
    try:
        cat.check_object(s.on)
        for f in s.members:
            cat.arrow(f)
    except (UnknownArrow, UnknownObject) as exc:
        raise MalformedDerivation(f"at {'/'.join(path) or 'root'}: {exc.message}", exc.witness) from None


def check(d: Derivation, a: AxiomFamily | SieveFamily) -> CheckResult:
    """Verify every rule instance of a derivation tree."""
    a = AxiomFamily.coerce(a)
    cat = a.cat

    def fail(path: list[str], reason: str) -> CheckResult:
        return CheckResult(False, tuple(path), reason)

    def walk(node: Derivation, path: list[str]) -> CheckResult:
        s = node.conclusion
        _well_typed(cat, s, path)
        if not is_sieve(cat, s):
            return fail(path, "conclusion is not a sieve")
        if isinstance(node, AxiomMaximal):
            if not is_maximal(cat, s) or s != maximal_sieve(cat, s.on):
                return fail(path, "AxiomMaximal conclusion is not a maximal sieve")
            return CheckResult(True)
        if isinstance(node, AxiomGiven):
            if s not in a:
                return fail(path, "AxiomGiven conclusion is not an axiom")
            return CheckResult(True)
        if isinstance(node, Stability):
            try:
                arrow = cat.arrow(node.arrow)
            except UnknownArrow as exc:
                raise MalformedDerivation(f"at {'/'.join(path) or 'root'}: {exc.message}", exc.witness) from None
            prem = node.premise.conclusion
            _well_typed(cat, prem, path + ["premise"])
            if arrow.cod != prem.on:
                return fail(path, f"arrow {node.arrow} does not end at {prem.on}")
            if pullback(cat, node.arrow, prem) != s:
                return fail(path, f"conclusion is not the pullback of the premise along {node.arrow}")
            return walk(node.premise, path + ["premise"])
        if isinstance(node, Transitivity):
            z = node.z_premise.conclusion
            _well_typed(cat, z, path + ["z_premise"])
            if z.on != s.on:
                return fail(path, "Z and the conclusion are on different objects")
            for f in cat.sort_arrows(z.members):
                if f not in node.branch:
                    return fail(path + [f"branch[{f}]"], f"missing premise for member {f} of Z")
            for f in node.branch:
                if f not in z.members:
                    return fail(path + [f"branch[{f}]"], f"{f} is not a member of Z")
            res = walk(node.z_premise, path + ["z_premise"])
            if not res:
                return res
            for f in cat.sort_arrows(z.members):
                sub = node.branch[f]
                _well_typed(cat, sub.conclusion, path + [f"branch[{f}]"])
                if sub.conclusion != pullback(cat, f, s):
                    return fail(path + [f"branch[{f}]"], f"premise is not the pullback of the conclusion along {f}")
                res = walk(sub, path + [f"branch[{f}]"])
                if not res:
                    return res
            return CheckResult(True)
        raise MalformedDerivation(f"unknown derivation node {type(node).__name__}")

    return walk(d, [])


# -- serialization ----------------------------------------------------------------


def derivation_to_json(cat: FinCat, d: Derivation) -> dict:
    doc: dict = {"rule": type(d).__name__, "conclusion": sieve_to_json(cat, d.conclusion)}
    if isinstance(d, Stability):
        doc["arrow"] = d.arrow
        doc["premise"] = derivation_to_json(cat, d.premise)
    elif isinstance(d, Transitivity):
        doc["z_premise"] = derivation_to_json(cat, d.z_premise)
        doc["branch"] = {f: derivation_to_json(cat, d.branch[f]) for f in cat.sort_arrows(d.branch)}
    return doc


def derivation_from_json(cat: FinCat, doc) -> Derivation:
    if not isinstance(doc, dict) or "rule" not in doc or "conclusion" not in doc:
        raise MalformedDerivation('derivation nodes need "rule" and "conclusion"', doc)
    c = doc["conclusion"]
    if not isinstance(c, dict) or not isinstance(c.get("on"), str) or not isinstance(c.get("arrows"), list):
        raise MalformedDerivation("malformed conclusion", c)
    try:
        cat.check_object(c["on"])
        for f in c["arrows"]:
            cat.arrow(f)
    except (UnknownArrow, UnknownObject) as exc:
        raise MalformedDerivation(exc.message, exc.witness) from None
    s = Sieve(c["on"], c["arrows"])
    rule = doc["rule"]
    if rule == "AxiomMaximal":
        return AxiomMaximal(s)
    if rule == "AxiomGiven":
        return AxiomGiven(s)
    if rule == "Stability":
        if not isinstance(doc.get("arrow"), str) or "premise" not in doc:
            raise MalformedDerivation('Stability needs "arrow" and "premise"', doc.get("arrow"))
        try:
            cat.arrow(doc["arrow"])
        except UnknownArrow as exc:
            raise MalformedDerivation(exc.message, exc.witness) from None
        return Stability(s, doc["arrow"], derivation_from_json(cat, doc["premise"]))
    if rule == "Transitivity":
        if "z_premise" not in doc or not isinstance(doc.get("branch"), dict):
            raise MalformedDerivation('Transitivity needs "z_premise" and "branch"')
        return Transitivity(
            s,
            derivation_from_json(cat, doc["z_premise"]),
            {f: derivation_from_json(cat, sub) for f, sub in doc["branch"].items()},
        )
    raise MalformedDerivation(f"unknown rule {rule!r}", rule)


def failure_to_json(cat: FinCat, failure: ProofFailure) -> dict:
    return {
        "provable": False,
        "target": sieve_to_json(cat, failure.target),
        "saturated": topology_to_json(failure.saturated),
    }


def axioms_from_json(cat: FinCat, doc) -> AxiomFamily:
    if isinstance(doc, dict) and "axioms" in doc:
        doc = doc["axioms"]
    if not isinstance(doc, list):
        raise MalformedDerivation('axioms must be a list of sieves (or {"axioms": [...]})', doc)
    return AxiomFamily(cat, (sieve_from_json(cat, s) for s in doc))
