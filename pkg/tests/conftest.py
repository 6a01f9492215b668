"""Shared fixtures: the worked examples and random instance generators."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import pytest
from hypothesis import strategies as st

from cqda.circuit import Circuit
from cqda.query import Atom, SignedQuery, parse_query
from cqda.relations import Database, Domain, Relation, VarOrder


def example51_db() -> Database:
    return Database(
        Domain(("0", "1")),
        {
            "S": Relation.from_rows(("c0", "c1", "c2", "c3"), [("0", "0", "0", "0")]),
            "R": Relation.from_rows(("c0", "c1"), [("0", "0"), ("0", "1"), ("1", "1"), ("1", "0")]),
            "T": Relation.from_rows(("c0", "c1"), [("0", "1"), ("1", "1")]),
        },
    )


def example51_query() -> SignedQuery:
    return parse_query("Q(x1,x2,x3,x4) :- !S(x1,x2,x3,x4), T(x1,x3), R(x2,x4).")


@pytest.fixture
def ex51():
    return example51_query(), example51_db(), VarOrder(("x1", "x2", "x3", "x4"))


def annotated_circuit() -> Circuit:
    """Three-variable circuit whose counting labels are [1,2,2], [2,4], [4,10,14].

    Top decision on x1: value 0 leads to an x2 gate over a shared x3
    gate, value 1 directly to an x3 gate with a free x2, and value 2 to
    a product of independent x2 and x3 gates.
    """
    c = Circuit(Domain(("0", "1", "2")), VarOrder(("x1", "x2", "x3")))
    top, bot = c.top(), c.bot()
    left_x3 = c.add_decision("x3", [("0", top), ("1", top), ("2", bot)])
    upper_x2 = c.add_decision("x2", [("0", left_x3), ("1", left_x3)])
    right_x3 = c.add_decision("x3", [("0", bot), ("1", top), ("2", top)])
    centre_x2 = c.add_decision("x2", [("0", top), ("1", bot), ("2", top)])
    prod = c.add_product([centre_x2, right_x3])
    out = c.add_decision("x1", [("0", upper_x2), ("1", right_x3), ("2", prod)])
    c.set_output(out)
    return c


@dataclass
class Instance:
    query: SignedQuery
    db: Database
    order: VarOrder  # significance order over the query variables


def make_instance(
    rng: random.Random,
    max_vars: int = 5,
    max_atoms: int = 4,
    max_dom: int = 4,
    max_tuples: int = 20,
) -> Instance:
    """Random signed query, database and significance order."""
    nvars = rng.randint(1, max_vars)
    pool = [f"x{i}" for i in range(nvars)]
    domain = Domain(tuple(str(i) for i in range(rng.randint(1, max_dom))))
    atoms: list[Atom] = []
    relations: dict[str, Relation] = {}
    for i in range(rng.randint(1, max_atoms)):
        arity = rng.randint(1, min(3, nvars))
        args = tuple(rng.sample(pool, arity))
        symbol = f"R{i}"
        positive = rng.random() < 0.55
        full = sorted(itertools.product(domain.values, repeat=arity))
        if positive and rng.random() < 0.5:
            # dense table behind a positive atom keeps answer sets alive
            rows = frozenset(rng.sample(full, min(max_tuples, len(full))))
        else:
            cap = min(max_tuples, len(full)) if positive else min(4, len(full))
            rows = frozenset(
                tuple(rng.choice(domain.values) for _ in range(arity))
                for _ in range(rng.randint(0, cap))
            )
        relations[symbol] = Relation(tuple(f"c{j}" for j in range(arity)), rows)
        atoms.append(Atom(positive, symbol, args))
    used = sorted({v for a in atoms for v in a.args})
    rng.shuffle(used)
    return Instance(SignedQuery(tuple(atoms)), Database(domain, relations), VarOrder(tuple(used)))


@st.composite
def instances(draw, max_vars=4, max_atoms=3, max_dom=3, max_tuples=8) -> Instance:
    seed = draw(st.integers(0, 2**48))
    return make_instance(random.Random(seed), max_vars, max_atoms, max_dom, max_tuples)


@st.composite
def hypergraphs(draw, max_vertices=6, max_edges=5):
    from cqda.hypergraph import Hypergraph

    n = draw(st.integers(1, max_vertices))
    verts = tuple(f"v{i}" for i in range(n))
    edges = draw(
        st.lists(
            st.sets(st.sampled_from(verts), min_size=1), min_size=0, max_size=max_edges
        )
    )
    return Hypergraph.of(verts, edges)
