"""Existential projection on ordered circuits and the full query pipeline.

Projection keeps a prefix of the circuit's universe: because the
circuit is ordered, every decision gate on a dropped variable sits
below the kept ones and can be replaced by a constant recording whether
its subcircuit is satisfiable.  The pipeline below compiles a query
(binarized by default), projects to the free variables when the query
has a head, and hands back direct access over the answers.

Order conventions, fixed once here: the user-facing order is the
lexicographic significance order (most significant variable first).
The compiler consumes its reverse as elimination order, and a query
with free variables needs the free set to be a significance-order
prefix, equivalently an elimination-order suffix.
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass

from . import access as acc
from .circuit import BotGate, Circuit, DecisionGate, TopGate
from .compiler import BinCodec, CompileStats, compile_binarized, debin_tuple, dpll_compile
from .errors import NotFreeConnexError
from .query import SignedQuery, check_compatible
from .relations import Assignment, Database, Domain, VarOrder


def project_circuit(c: Circuit, idx: acc.AccessIndex, keep: int) -> Circuit:
    """Drop all but the first ``keep`` universe variables from the circuit.

    Every decision gate on a dropped variable collapses to Top when its
    relation is nonempty and to Bot otherwise; the result computes the
    projection of the original relation and is never larger.
    """
    n = len(c.universe)
    if not 0 <= keep <= n:
        raise ValueError(f"keep must lie in 0..{n}")
    kept_vars = VarOrder(c.universe.vars[:keep])
    kept_set = set(kept_vars.vars)
    out = Circuit(c.domain, kept_vars)
    mapping: dict[int, int] = {}
    for gid in c.reachable():
        g = c.gates[gid]
        if isinstance(g, TopGate):
            mapping[gid] = out.top()
        elif isinstance(g, BotGate):
            mapping[gid] = out.bot()
        elif isinstance(g, DecisionGate):
            if g.var in kept_set:
                mapping[gid] = out.add_decision(g.var, [(v, mapping[ch]) for v, ch in g.edges])
            else:
                mapping[gid] = out.top() if idx.rel_count[gid] > 0 else out.bot()
        else:
            mapping[gid] = out.add_product(mapping[ch] for ch in g.children)
    out.set_output(mapping[c.output])
    return out


@dataclass(eq=False)
class CircuitEngine:
    """Direct access handle over the answers of one compiled query.

    ``universe`` is the significance order of the answer variables
    (the free variables when the query had a head).  Counting, k-th
    answer, ranking and enumeration all run on the preprocessed circuit;
    binarized pipelines decode bit tuples transparently.
    """

    universe: VarOrder
    domain: Domain
    circuit: Circuit
    index: acc.AccessIndex
    stats: CompileStats
    codec: BinCodec | None = None

    def count(self) -> int:
        return acc.count(self.circuit, self.index)

    def kth(self, k: int) -> Assignment:
        raw = acc.direct_access(self.circuit, self.index, k)
        if self.codec is None:
            return raw
        return debin_tuple(raw, self.codec).restrict(self.universe.vars)

    def rank_of(self, t: Mapping[str, str]) -> int:
        if self.codec is None:
            return acc.rank(self.circuit, self.index, t)
        encoded = self.codec.encode_assignment({v: t[v] for v in self.universe.vars})
        return acc.rank(self.circuit, self.index, encoded)

    def answers(self, start: int = 1, limit: int | None = None) -> Iterator[Assignment]:
        total = self.count()
        if limit is None:
            limit = max(0, total - start + 1)
        for k in range(start, start + limit):
            yield self.kth(k)


def da_conjunctive(
    q: SignedQuery,
    db: Database,
    order: VarOrder,
    *,
    binarize: bool = True,
) -> CircuitEngine:
    """Compile, optionally project, preprocess; return the access handle.

    ``order`` is the significance order and must cover the query
    variables (it may mention extra variables, which pad the answer
    space).  When the query has free variables they must form a prefix
    of ``order``; otherwise the order is rejected as not free-connex.
    """
    check_compatible(q, db)
    if not q.variables <= set(order.vars):
        raise ValueError("order must cover every query variable")

    if q.free is None:
        keep_count = len(order)
    else:
        keep_count = len(q.free)
        if frozenset(order.vars[:keep_count]) != q.free:
            raise NotFreeConnexError(
                "free variables must form a prefix of the significance order"
            )
    answer_order = VarOrder(order.vars[:keep_count])

    body = SignedQuery(q.atoms, None)
    elimination = order.reversed()
    codec: BinCodec | None = None
    if binarize:
        circuit, codec, stats = compile_binarized(body, db, elimination)
        keep_bits = keep_count * codec.bits
        if keep_bits < len(circuit.universe):
            idx = acc.preprocess(circuit)
            circuit = project_circuit(circuit, idx, keep_bits)
    else:
        circuit, stats = dpll_compile(body, db, elimination)
        if keep_count < len(circuit.universe):
            idx = acc.preprocess(circuit)
            circuit = project_circuit(circuit, idx, keep_count)
    index = acc.preprocess(circuit)
    return CircuitEngine(answer_order, db.domain, circuit, index, stats, codec)
