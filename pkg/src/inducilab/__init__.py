"""inducilab: a desk-scale toolkit for inducibility questions on Cayley graphs
of finite abelian groups.

Modules
-------
groups     finite abelian groups, the +-pairing and doubling equations
graph      bitset graphs, block adjacency, modules and primality
graph6     graph6 encoding and decoding
iso        isomorphism tests and isomorphism-class enumeration
cayley     connection sets, Cayley graphs, rotations and reflections
embed      exact embedding / automorphism / induced-copy counting
extremal   emb(H, n) by exhaustive search or local search
blowup     (iterated) blow-ups, closed-form counts, the objective T
certify    typicality, reasonableness, signatures
bounds     E_l(m), the epsilon ledger, precondition arithmetic
cli        command-line interface
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import CapacityError, DomainError, Graph6Error, StructuralError
from .graph import Graph
from .groups import AbelianGroup

__all__ = [
    "AbelianGroup",
    "CapacityError",
    "DomainError",
    "Graph",
    "Graph6Error",
    "StructuralError",
    "__version__",
]
