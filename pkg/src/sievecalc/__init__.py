"""Grothendieck topologies, local operators and subtoposes on finite categories."""

from .errors import SievecalcError
from .fincat import Arrow, FinCat, build_category, builtin, load_category, validate
from .sieve import Guard, Presieve, Sieve, all_sieves, generate_sieve, make_sieve, pullback
from .topology import (
    SieveFamily,
    Topology,
    bottom,
    enumerate_topologies,
    generate_topology,
    implication,
    is_topology,
    join,
    leq,
    meet,
    negation,
    sieve_closure,
    top,
)

__version__ = "0.1.0"

__all__ = [
    "SievecalcError", "Arrow", "FinCat", "build_category", "builtin", "load_category", "validate",
    "Guard", "Presieve", "Sieve", "all_sieves", "generate_sieve", "make_sieve", "pullback",
    "SieveFamily", "Topology", "bottom", "enumerate_topologies", "generate_topology", "implication",
    "is_topology", "join", "leq", "meet", "negation", "sieve_closure", "top",
]
