"""Direct access to the answers of signed conjunctive queries.

Pipeline: parse a query, pick a significance order, compile to an
ordered relational circuit (binarized by default), preprocess counting
tables, then answer count / k-th answer / rank / enumeration requests in
polylogarithmic time per call.  A reduction-based second engine and
brute-force oracles back every step for differential testing.
"""

from .relations import Assignment, Database, Domain, Relation, VarOrder
from .query import Atom, SignedQuery, parse_query, eval_bruteforce
from .project import CircuitEngine, da_conjunctive
from .reduction import signed_da_via_reduction

__all__ = [
    "Assignment",
    "Atom",
    "CircuitEngine",
    "Database",
    "Domain",
    "Relation",
    "SignedQuery",
    "VarOrder",
    "da_conjunctive",
    "eval_bruteforce",
    "parse_query",
    "signed_da_via_reduction",
]
