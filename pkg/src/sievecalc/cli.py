"""Command-line front end: ``sievecalc <verb> [options]``.

Every verb loads its inputs, calls one library operation and prints the
result as canonical JSON (or DOT for ``lattice --format dot``). Domain
errors print a JSON error document and exit 1; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import acceptance
from .errors import SievecalcError
from .fincat import FIXTURE_NAMES, FinCat, builtin, load_category
from .localop import relativize
from .proofsys import (
    ProofFailure,
    axioms_from_json,
    check,
    derivation_from_json,
    derivation_to_json,
    failure_to_json,
    prove,
)
from .sieve import Guard, all_sieves, sieve_from_json, sieve_to_json
from .subtopos import (
    atoms,
    booleanization,
    closed_topology,
    dense_closed_factorization,
    ideal_from_json,
    ideal_to_json,
    ideals,
    is_dense,
    is_skeletal,
    j_ideals,
    open_topology,
    quasiclosed_topology,
)
from .topology import (
    Topology,
    bottom,
    enumerate_topologies,
    family_from_json,
    generate_topology,
    hasse,
    implication,
    join,
    leq_matrix,
    meet,
    negation,
    sieve_closure,
    top,
    topology_from_json,
    topology_to_json,
)


class UsageError(Exception):
    pass


def _read_json(value: str, what: str):
    """``value`` is a path to a JSON file or inline JSON text."""
    text = value
    if os.path.exists(value):
        with open(value, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: not a readable file or valid JSON ({exc.msg})") from None


def _category(value: str | None) -> FinCat:
    if value is None:
        raise UsageError("--category is required")
    if value in FIXTURE_NAMES and not os.path.exists(value):
        return builtin(value)
    if not os.path.exists(value):
        raise UsageError(f"--category: no such file or fixture {value!r} (fixtures: {', '.join(FIXTURE_NAMES)})")
    with open(value, encoding="utf-8") as fh:
        return load_category(fh.read())


def _topology(cat: FinCat, value: str, guard: Guard) -> Topology:
    if value == "bottom":
        return bottom(cat)
    if value == "top":
        return top(cat, guard)
    return topology_from_json(cat, _read_json(value, "--topology"), guard)


def _topologies(args, cat: FinCat, n: int) -> list[Topology]:
    given = args.topology or []
    if len(given) != n:
        raise UsageError(f"{args.verb} needs exactly {n} --topology argument(s), got {len(given)}")
    return [_topology(cat, v, args.guard_obj) for v in given]


def _required(args, name: str) -> str:
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"{args.verb} needs --{name}")
    return value


def _dot(lattice: list[Topology]) -> str:
    lines = ["digraph topologies {", "  rankdir=BT;"]
    for i, j in enumerate(lattice):
        label = "; ".join(f"{c}:{len(j[c])}" for c in j.cat.objects)
        lines.append(f'  n{i} [label="J{i} ({label})"];')
    for lo, hi in hasse(lattice):
        lines.append(f"  n{lo} -> n{hi};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _run_verb(args) -> object:
    verb = args.verb
    guard = args.guard_obj
    if verb == "selftest":
        return None
    cat = _category(args.category)

    if verb == "validate":
        return {"valid": True, "objects": len(cat.objects), "arrows": len(cat.arrows)}
    if verb == "sieves":
        objs = [args.object] if args.object else list(cat.objects)
        for c in objs:
            cat.check_object(c)
        return {c: [sieve_to_json(cat, s) for s in all_sieves(cat, c, guard)] for c in objs}
    if verb == "topologies":
        return [topology_to_json(j) for j in enumerate_topologies(cat, guard)]
    if verb == "lattice":
        lattice = enumerate_topologies(cat, guard)
        if args.format == "dot":
            return _dot(lattice)
        return {
            "nodes": [topology_to_json(j) for j in lattice],
            "leq": leq_matrix(lattice),
            "hasse": [list(e) for e in hasse(lattice)],
        }
    if verb == "generate":
        fam = family_from_json(cat, _read_json(_required(args, "family"), "--family"))
        return topology_to_json(generate_topology(fam, guard))
    if verb in ("meet", "join", "implies"):
        a, b = _topologies(args, cat, 2)
        if verb == "meet":
            return topology_to_json(meet(a, b))
        if verb == "join":
            return topology_to_json(join(a, b, guard))
        return topology_to_json(implication(a, b, guard))
    if verb == "neg":
        (a,) = _topologies(args, cat, 1)
        return topology_to_json(negation(a, guard))
    if verb == "closure":
        (j,) = _topologies(args, cat, 1)
        s = sieve_from_json(cat, _read_json(_required(args, "sieve"), "--sieve"))
        return sieve_to_json(cat, sieve_closure(s, j))
    if verb in ("open", "closed", "qc"):
        (j,) = _topologies(args, cat, 1)
        u = ideal_from_json(cat, _read_json(_required(args, "ideal"), "--ideal"))
        op = {"open": open_topology, "closed": closed_topology, "qc": quasiclosed_topology}[verb]
        return topology_to_json(op(j, u, guard))
    if verb == "booleanize":
        (j,) = _topologies(args, cat, 1)
        return topology_to_json(booleanization(j, guard))
    if verb in ("factor", "dense", "skeletal"):
        jp, j = _topologies(args, cat, 2)
        if verb == "factor":
            return topology_to_json(dense_closed_factorization(jp, j, guard))
        if verb == "dense":
            return {"dense": is_dense(jp, j)}
        return {"skeletal": is_skeletal(jp, j)}
    if verb == "relativize":
        k, j = _topologies(args, cat, 2)
        rel = relativize(k, j, guard)
        return [
            {"on": c, "sieve": cat.sort_arrows(s.members), "image": cat.sort_arrows(rel(c, s).members)}
            for (c, s) in rel.action
        ]
    if verb == "atoms":
        j = _topology(cat, args.topology[0], guard) if args.topology else bottom(cat)
        return [topology_to_json(k) for k in atoms(cat, j, guard)]
    if verb == "ideals":
        if args.topology:
            (j,) = _topologies(args, cat, 1)
            return [ideal_to_json(u) for u in j_ideals(j)]
        return [ideal_to_json(u) for u in ideals(cat)]
    if verb == "prove":
        a = axioms_from_json(cat, _read_json(_required(args, "axioms"), "--axioms"))
        target = sieve_from_json(cat, _read_json(_required(args, "target"), "--target"))
        d = prove(target, a, guard)
        if isinstance(d, ProofFailure):
            return failure_to_json(cat, d)
        return derivation_to_json(cat, d)
    if verb == "check":
        a = axioms_from_json(cat, _read_json(_required(args, "axioms"), "--axioms"))
        d = derivation_from_json(cat, _read_json(_required(args, "derivation"), "--derivation"))
        res = check(d, a)
        return {"ok": res.ok, "path": list(res.path), "reason": res.reason}
    raise UsageError(f"unknown verb {verb!r}")


VERBS = (
    "validate", "sieves", "topologies", "lattice", "generate", "meet", "join", "implies", "neg",
    "closure", "open", "closed", "qc", "booleanize", "factor", "dense", "skeletal", "relativize",
    "atoms", "ideals", "prove", "check", "selftest",
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sievecalc",
        description="Grothendieck topologies on finite categories.",
        epilog="Two-topology verbs take --topology in argument order: meet/join/implies A B; "
        "factor/dense/skeletal JP J (JP above J); relativize K J.",
    )
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--category", help="category JSON file or fixture name (" + ", ".join(FIXTURE_NAMES) + ")")
    p.add_argument("--topology", action="append", help="topology file, inline JSON, 'bottom' or 'top' (repeatable)")
    p.add_argument("--family", help="sieve family (file or inline JSON)")
    p.add_argument("--sieve", help='sieve {"on": ..., "arrows": [...]} (file or inline JSON)')
    p.add_argument("--target", help="target sieve for prove")
    p.add_argument("--ideal", help='ideal {"objects": [...]} (file or inline JSON)')
    p.add_argument("--axioms", help="axiom sieves for prove/check")
    p.add_argument("--derivation", help="derivation document for check")
    p.add_argument("--object", help="restrict sieves to one object")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--guard", type=int, metavar="N", help="maximum number of sieves to quantify over")
    p.add_argument("--max-arrows-into", type=int, metavar="N", help="maximum arrows into a single object")
    p.add_argument("--seed", type=int, default=0, help="seed for selftest sweeps")
    p.add_argument("--suite", type=int, action="append", help="selftest: run only this suite (repeatable)")
    return p


def _selftest(args, out) -> int:
    all_ok = True
    for n, title, outcome, elapsed in acceptance.run_all(args.seed, args.suite):
        status = "PASS" if outcome.passed else "FAIL"
        all_ok = all_ok and outcome.passed
        out.write(f"[{status}] {n:2d} {title}: {outcome.detail()} ({elapsed:.1f}s)\n")
    return 0 if all_ok else 1


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    defaults = Guard()
    args.guard_obj = Guard(
        max_arrows_into=args.max_arrows_into if args.max_arrows_into is not None else defaults.max_arrows_into,
        max_sieves=args.guard if args.guard is not None else defaults.max_sieves,
    )
    if args.verb == "selftest":
        return _selftest(args, out)
    try:
        result = _run_verb(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"sievecalc: error: {exc}\n")
        return 2
    except SievecalcError as exc:
        out.write(json.dumps(exc.to_document(), indent=2) + "\n")
        return 1
    if isinstance(result, str):
        out.write(result)
    else:
        out.write(json.dumps(result, indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
