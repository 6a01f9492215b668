"""Counting tables and polylog direct access on ordered circuits.

The preprocessing fills, bottom-up, the tuple count of every gate and
the running prefix counts along each decision gate's sorted edges.  A
direct access then walks the circuit's universe (significance order,
most significant variable first), maintaining the frontier of gates
compatible with the bound prefix and answering one counting query per
variable.  All counts are exact Python integers, so nothing overflows
even when they exceed machine words.
"""

from __future__ import annotations

from bisect import bisect_left
from collections.abc import Iterator, Mapping
from dataclasses import dataclass

from .circuit import BotGate, Circuit, DecisionGate, ProductGate, TopGate
from .errors import NotAPrefixError, OutOfRangeError, UnsatisfiableError
from .relations import Assignment


@dataclass
class AccessIndex:
    """Per-gate counts and variable masks; immutable once built."""

    rel_count: dict[int, int]
    var_mask: dict[int, int]
    prefix_counts: dict[int, list[int]]      # decision gate -> running counts per edge
    edge_values: dict[int, list[str]]        # decision gate -> edge values, ascending
    edge_children: dict[int, list[int]]


@dataclass(frozen=True)
class Frontier:
    """Pairwise variable-disjoint gates compatible with a bound prefix.

    ``gates`` is ``None`` when the prefix reached a Bot gate or a missing
    decision edge, meaning no extension of the prefix is an answer.
    """

    gates: tuple[int, ...] | None

    @property
    def empty(self) -> bool:
        return self.gates is None


def preprocess(c: Circuit) -> AccessIndex:
    """Fill the counting tables bottom-up in topological order."""
    dsize = len(c.domain)
    pos = {v: i for i, v in enumerate(c.universe.vars)}
    rel_count: dict[int, int] = {}
    var_mask: dict[int, int] = {}
    prefix_counts: dict[int, list[int]] = {}
    edge_values: dict[int, list[str]] = {}
    edge_children: dict[int, list[int]] = {}

    for gid in c.reachable():
        g = c.gates[gid]
        if isinstance(g, BotGate):
            rel_count[gid], var_mask[gid] = 0, 0
        elif isinstance(g, TopGate):
            rel_count[gid], var_mask[gid] = 1, 0
        elif isinstance(g, ProductGate):
            total, mask = 1, 0
            for child in g.children:
                total *= rel_count[child]
                mask |= var_mask[child]
            rel_count[gid], var_mask[gid] = total, mask
        else:
            mask = 1 << pos[g.var]
            for _, child in g.edges:
                mask |= var_mask[child]
            own = bin(mask).count("1")
            running = 0
            counts: list[int] = []
            for _, child in g.edges:
                # pad each branch with the variables it does not mention
                gap = own - 1 - bin(var_mask[child]).count("1")
                running += rel_count[child] * dsize**gap
                counts.append(running)
            rel_count[gid], var_mask[gid] = running, mask
            prefix_counts[gid] = counts
            edge_values[gid] = [v for v, _ in g.edges]
            edge_children[gid] = [child for _, child in g.edges]
    return AccessIndex(rel_count, var_mask, prefix_counts, edge_values, edge_children)


def count(c: Circuit, idx: AccessIndex) -> int:
    """Number of tuples of the circuit's relation over the full universe."""
    free = len(c.universe) - bin(idx.var_mask[c.output]).count("1")
    return idx.rel_count[c.output] * len(c.domain) ** free


def _expand(c: Circuit, gates: Iterator[int] | list[int]) -> tuple[int, ...] | None:
    """Replace product gates by their sinks; ``None`` once a Bot appears."""
    out: list[int] = []
    stack = list(gates)
    while stack:
        gid = stack.pop()
        g = c.gates[gid]
        if isinstance(g, ProductGate):
            stack.extend(g.children)
        elif isinstance(g, BotGate):
            return None
        else:
            out.append(gid)
    return tuple(out)


def frontier(c: Circuit, idx: AccessIndex, tau: Mapping[str, str]) -> Frontier:
    """Gates left after committing a prefix assignment of the universe.

    Starting from the output, product gates dissolve into their sinks
    and decision gates on bound variables are crossed along the matching
    edge; a missing edge or a Bot gate empties the frontier.
    """
    prefix = c.universe.vars[: len(tau)]
    if set(prefix) != set(tau):
        raise NotAPrefixError("assignment must bind a prefix of the universe order")
    gates = _expand(c, [c.output])
    changed = True
    while gates is not None and changed:
        changed = False
        for i, gid in enumerate(gates):
            g = c.gates[gid]
            if isinstance(g, DecisionGate) and g.var in tau:
                child = dict(g.edges).get(tau[g.var])
                rest = gates[:i] + gates[i + 1:]
                gates = None if child is None else _expand(c, [child])
                if gates is not None:
                    gates = rest + gates
                changed = True
                break
    return Frontier(gates)


def _oracle(c: Circuit, idx: AccessIndex, gates: tuple[int, ...], p: int, n: int):
    """Smallest value for variable ``p`` reaching ``n`` extensions, and the
    count of extensions strictly below it.

    Returns ``(value, below, decision_gate_or_None)``.
    """
    dsize = len(c.domain)
    x = c.universe.vars[p]
    var_mask = 0
    gate_on_x = None
    for gid in gates:
        var_mask |= idx.var_mask[gid]
        g = c.gates[gid]
        if isinstance(g, DecisionGate) and g.var == x:
            gate_on_x = gid
    free_rest = (len(c.universe) - p) - bin(var_mask).count("1")

    if gate_on_x is not None:
        product = dsize**free_rest
        for gid in gates:
            if gid != gate_on_x:
                product *= idx.rel_count[gid]
        if product == 0:
            raise OutOfRangeError("no extension below this prefix")
        target = -(-n // product)  # ceil
        counts = idx.prefix_counts[gate_on_x]
        i = bisect_left(counts, target)
        if i == len(counts):
            raise OutOfRangeError("n exceeds the number of extensions")
        below = counts[i - 1] * product if i > 0 else 0
        return idx.edge_values[gate_on_x][i], below, gate_on_x

    product = dsize ** (free_rest - 1)
    for gid in gates:
        product *= idx.rel_count[gid]
    if product == 0:
        raise OutOfRangeError("no extension below this prefix")
    r = -(-n // product)
    if r > dsize:
        raise OutOfRangeError("n exceeds the number of extensions")
    return c.domain.value_at(r), (r - 1) * product, None


def count_leq(c: Circuit, idx: AccessIndex, tau: Mapping[str, str], n: int) -> tuple[str, int]:
    """Counting oracle for the first unbound variable after prefix ``tau``.

    Returns the smallest domain value ``d`` such that at least ``n``
    tuples extend ``tau`` with the next variable at most ``d``, together
    with the number of extensions strictly below ``d``.
    """
    if len(tau) >= len(c.universe):
        raise NotAPrefixError("prefix already binds every variable")
    if n < 1:
        raise OutOfRangeError("n must be at least 1")
    f = frontier(c, idx, tau)
    if f.empty:
        raise UnsatisfiableError("prefix admits no extension")
    value, below, _ = _oracle(c, idx, f.gates, len(tau), n)
    return value, below


def direct_access(c: Circuit, idx: AccessIndex, k: int) -> Assignment:
    """The k-th tuple (1-based) of the circuit's relation in its universe order."""
    total = count(c, idx)
    if k < 1 or k > total:
        raise OutOfRangeError(f"k out of range (count={total})")
    gates = _expand(c, [c.output])
    bound: dict[str, str] = {}
    for p in range(len(c.universe)):
        value, below, gate_on_x = _oracle(c, idx, gates, p, k)
        bound[c.universe.vars[p]] = value
        k -= below
        if gate_on_x is not None:
            child = dict(c.gates[gate_on_x].edges)[value]
            rest = tuple(g for g in gates if g != gate_on_x)
            expanded = _expand(c, [child])
            if expanded is None:
                raise UnsatisfiableError("descended into an empty branch")
            gates = rest + expanded
    return Assignment(bound)


def rank(c: Circuit, idx: AccessIndex, t: Mapping[str, str]) -> int:
    """Number of tuples at most ``t`` in the circuit's relation.

    Binary search over direct accesses; when ``t`` itself is an answer
    this is its 1-based rank.
    """
    from .relations import lex_compare

    if set(t) != set(c.universe.vars):
        raise ValueError("rank needs a tuple over the full universe")
    lo, hi = 0, count(c, idx)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if lex_compare(direct_access(c, idx, mid), t, c.universe, c.domain) <= 0:
            lo = mid
        else:
            hi = mid - 1
    return lo


def enumerate_answers(c: Circuit, idx: AccessIndex, start: int = 1, limit: int | None = None) -> Iterator[Assignment]:
    """Stream answers ``start .. start+limit-1`` in lexicographic order."""
    total = count(c, idx)
    if limit is None:
        limit = max(0, total - start + 1)
    if limit == 0:
        return
    if start < 1 or start + limit - 1 > total:
        raise OutOfRangeError(f"window outside 1..{total}")
    for k in range(start, start + limit):
        yield direct_access(c, idx, k)
