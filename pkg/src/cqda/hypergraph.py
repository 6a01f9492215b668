"""Hypergraphs, elimination orders, cover numbers and width measures.

Width values are exact: integer cover numbers come from a complete
branch-and-bound search and fractional ones from a rational simplex.
No floating point is involved anywhere.

Vertex elimination ``H/v`` removes ``v`` from every edge and adds the
open neighbourhood of ``v`` as a fresh edge.  The width of an order is
the worst cover number, over all elimination steps, of the removed
vertex's neighbourhood, covered with the hypergraph's original edges.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError, UncoverableError, VertexNotFoundError
from .relations import VarOrder

EliminationOrder = VarOrder


@dataclass(frozen=True)
class Budget:
    """Cap on exhaustive-search state counts; exceeding it is an error."""

    max_states: int = 1 << 20


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class Hypergraph:
    vertices: frozenset[str]
    edges: tuple[frozenset[str], ...]

    def __post_init__(self):
        for e in self.edges:
            if not e <= self.vertices:
                raise ValueError("edge mentions a vertex outside the hypergraph")

    @classmethod
    def of(cls, vertices: Iterable[str], edges: Iterable[Iterable[str]]) -> Hypergraph:
        return cls(frozenset(vertices), tuple(frozenset(e) for e in edges))

    def neighbourhood(self, v: str) -> frozenset[str]:
        """Union of the edges containing ``v`` (``v`` included when covered)."""
        out: set[str] = set()
        for e in self.edges:
            if v in e:
                out |= e
        return frozenset(out)


@dataclass(frozen=True)
class SignedHypergraph:
    vertices: frozenset[str]
    pos_edges: tuple[frozenset[str], ...]
    neg_edges: tuple[frozenset[str], ...]

    def __post_init__(self):
        for e in self.pos_edges + self.neg_edges:
            if not e <= self.vertices:
                raise ValueError("edge mentions a vertex outside the hypergraph")

    @classmethod
    def of(cls, vertices, pos_edges, neg_edges) -> SignedHypergraph:
        return cls(
            frozenset(vertices),
            tuple(frozenset(e) for e in pos_edges),
            tuple(frozenset(e) for e in neg_edges),
        )

    def unsigned(self) -> Hypergraph:
        return Hypergraph(self.vertices, self.pos_edges + self.neg_edges)


def remove_vertex(h: Hypergraph, v: str) -> Hypergraph:
    """``H/v``: drop ``v`` everywhere, add its open neighbourhood as an edge."""
    if v not in h.vertices:
        raise VertexNotFoundError(f"vertex {v} not in hypergraph")
    open_nb = h.neighbourhood(v) - {v}
    edges = [e - {v} for e in h.edges if e - {v}]
    edges.append(open_nb)
    # drop duplicates and the empty open neighbourhood of an isolated vertex
    seen: list[frozenset[str]] = []
    for e in edges:
        if e and e not in seen:
            seen.append(e)
    return Hypergraph(h.vertices - {v}, tuple(seen))


# --- cover numbers ----------------------------------------------------------

def _dedupe(edges: Sequence[frozenset[str]]) -> list[frozenset[str]]:
    out: list[frozenset[str]] = []
    for e in edges:
        if e not in out:
            out.append(e)
    return out


def cover_number(s: Iterable[str], edges: Sequence[frozenset[str]], budget: Budget = DEFAULT_BUDGET) -> int:
    """Minimum number of edges whose union contains ``s`` (exact)."""
    need = frozenset(s)
    if not need:
        return 0
    family = [e & need for e in _dedupe(edges)]
    family = [e for e in family if e]
    covered = frozenset().union(*family) if family else frozenset()
    if not need <= covered:
        raise UncoverableError(f"{sorted(need - covered)} not covered by any edge")
    # branch on an uncovered element; every cover uses some edge containing it
    best = len(family)
    states = 0

    def search(uncovered: frozenset[str], used: int) -> None:
        nonlocal best, states
        states += 1
        if states > budget.max_states:
            raise BudgetExceededError("cover search exceeded the state budget")
        if used >= best:
            return
        if not uncovered:
            best = used
            return
        pivot = min(uncovered)
        for e in family:
            if pivot in e:
                search(uncovered - e, used + 1)

    search(need, 0)
    return best


def _simplex_max(constraints: list[list[Fraction]], rhs: list[Fraction], objective: list[Fraction]) -> Fraction:
    """Maximise ``objective . y`` subject to ``constraints . y <= rhs``, y >= 0.

    Standard tableau simplex over exact rationals with Bland's rule, so
    termination is guaranteed.  The slack basis must be feasible, which
    holds here because every right-hand side is 1.
    """
    m, n = len(constraints), len(objective)
    # tableau rows: [A | I | b]; the cost row tracks reduced costs and,
    # in its last entry, the current objective value
    tab = [constraints[i][:] + [Fraction(int(i == j)) for j in range(m)] + [rhs[i]] for i in range(m)]
    cost = [-c for c in objective] + [Fraction(0)] * (m + 1)
    basis = [n + i for i in range(m)]
    while True:
        # Bland's rule: smallest improving column, smallest basic row on ties
        col = next((j for j in range(n + m) if cost[j] < 0), None)
        if col is None:
            return cost[-1]
        row, best = None, None
        for i in range(m):
            if tab[i][col] > 0:
                ratio = tab[i][-1] / tab[i][col]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    row, best = i, ratio
        if row is None:
            raise UncoverableError("unbounded covering dual")
        piv = tab[row][col]
        tab[row] = [x / piv for x in tab[row]]
        for i in range(m):
            if i != row and tab[i][col]:
                f = tab[i][col]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[row])]
        if cost[col]:
            f = cost[col]
            cost = [a - f * b for a, b in zip(cost, tab[row])]
        basis[row] = col


def fractional_cover_number(
    s: Iterable[str], edges: Sequence[frozenset[str]], budget: Budget = DEFAULT_BUDGET
) -> Fraction:
    """Exact optimum of the fractional covering program for ``s``.

    Solved through the packing dual (one variable per covered vertex,
    one constraint per edge), whose slack basis is immediately feasible;
    strong duality gives the covering optimum.
    """
    need = sorted(frozenset(s))
    if not need:
        return Fraction(0)
    family = [e & frozenset(need) for e in _dedupe(edges)]
    family = [e for e in family if e]
    covered = frozenset().union(*family) if family else frozenset()
    if not frozenset(need) <= covered:
        raise UncoverableError(f"{sorted(frozenset(need) - covered)} not covered by any edge")
    index = {v: i for i, v in enumerate(need)}
    rows = [[Fraction(int(need[j] in e)) for j in range(len(need))] for e in family]
    rhs = [Fraction(1)] * len(family)
    objective = [Fraction(1)] * len(need)
    return _simplex_max(rows, rhs, objective)


# --- widths of elimination orders -------------------------------------------

def _step_sets(h: Hypergraph, order: Sequence[str]) -> Iterable[frozenset[str]]:
    """Neighbourhood of each removed vertex at its removal, in order."""
    current = h
    for v in order:
        yield current.neighbourhood(v)
        current = remove_vertex(current, v)


def how_width(h: Hypergraph, order: EliminationOrder, budget: Budget = DEFAULT_BUDGET) -> int:
    """Worst integer cover number along the elimination, against the original edges."""
    width = 0
    for nb in _step_sets(h, list(order)):
        width = max(width, cover_number(nb, h.edges, budget))
    return width


def fhow_width(h: Hypergraph, order: EliminationOrder, budget: Budget = DEFAULT_BUDGET) -> Fraction:
    width = Fraction(0)
    for nb in _step_sets(h, list(order)):
        width = max(width, fractional_cover_number(nb, h.edges, budget))
    return width


def negative_subhypergraphs(h: SignedHypergraph, budget: Budget = DEFAULT_BUDGET) -> Iterable[Hypergraph]:
    """All hypergraphs keeping every positive edge and a subset of negative ones."""
    if 2 ** len(h.neg_edges) > budget.max_states:
        raise BudgetExceededError(f"2^{len(h.neg_edges)} negative subhypergraphs exceed the budget")
    for r in range(len(h.neg_edges) + 1):
        for chosen in itertools.combinations(h.neg_edges, r):
            yield Hypergraph(h.vertices, h.pos_edges + chosen)


def show_width(h: SignedHypergraph, order: EliminationOrder, budget: Budget = DEFAULT_BUDGET) -> int:
    """Worst ``how`` width over every choice of kept negative edges."""
    return max(how_width(sub, order, budget) for sub in negative_subhypergraphs(h, budget))


def sfhow_width(h: SignedHypergraph, order: EliminationOrder, budget: Budget = DEFAULT_BUDGET) -> Fraction:
    return max(fhow_width(sub, order, budget) for sub in negative_subhypergraphs(h, budget))


def _graphs_for(h: Hypergraph | SignedHypergraph, kind: str, budget: Budget) -> list[Hypergraph]:
    """The family of hypergraphs a width measure maximises over."""
    if kind in ("show", "sfhow"):
        signed = h if isinstance(h, SignedHypergraph) else SignedHypergraph(h.vertices, h.edges, ())
        return list(negative_subhypergraphs(signed, budget))
    plain = h.unsigned() if isinstance(h, SignedHypergraph) else h
    if kind in ("bhow", "bfhow"):
        return list(_all_subhypergraphs(plain, budget))
    if kind in ("how", "fhow"):
        return [plain]
    raise ValueError(f"unknown width measure {kind!r}")


def _all_subhypergraphs(h: Hypergraph, budget: Budget) -> Iterable[Hypergraph]:
    if 2 ** len(h.edges) > budget.max_states:
        raise BudgetExceededError(f"2^{len(h.edges)} subhypergraphs exceed the budget")
    for r in range(len(h.edges) + 1):
        for chosen in itertools.combinations(h.edges, r):
            yield Hypergraph(h.vertices, chosen)


def bhow_width(h: Hypergraph, order: EliminationOrder, budget: Budget = DEFAULT_BUDGET) -> int:
    """Worst ``how`` width over all edge subsets (hereditary width of the order)."""
    return max(how_width(sub, order, budget) for sub in _all_subhypergraphs(h, budget))


def bfhow_width(h: Hypergraph, order: EliminationOrder, budget: Budget = DEFAULT_BUDGET) -> Fraction:
    return max(fhow_width(sub, order, budget) for sub in _all_subhypergraphs(h, budget))


# --- optimal orders ---------------------------------------------------------
#
# Order search works on bitmask views of a fixed vertex tuple.  Removing
# a vertex set yields the same hypergraph whatever the removal order, so
# elimination state can be keyed by the removed set alone; the DP below
# relies on that and is cross-checked against permutation enumeration in
# the tests.  Per-edge-family tables are memoised globally because width
# searches over subhypergraph families revisit the same families heavily.


class _FamilyTable:
    """Elimination neighbourhoods and cover costs for one edge family."""

    def __init__(self, n: int, edges: tuple[int, ...], budget: Budget):
        self.n = n
        self.budget = budget
        deduped: list[int] = []
        for e in edges:
            if e and e not in deduped:
                deduped.append(e)
        self.edges = tuple(deduped)
        self._after: dict[int, tuple[int, ...]] = {0: self.edges}
        self._cn: dict[int, int] = {}
        self._fcn: dict[int, Fraction] = {}

    def edges_after(self, removed: int) -> tuple[int, ...]:
        got = self._after.get(removed)
        if got is None:
            vbit = 1 << (removed.bit_length() - 1)
            prev = self.edges_after(removed ^ vbit)
            nb = 0
            for e in prev:
                if e & vbit:
                    nb |= e
            nb &= ~vbit
            out: list[int] = []
            for e in prev:
                e2 = e & ~vbit
                if e2 and e2 not in out:
                    out.append(e2)
            if nb and nb not in out:
                out.append(nb)
            got = tuple(out)
            self._after[removed] = got
        return got

    def neighbourhood(self, removed: int, vbit: int) -> int:
        nb = 0
        for e in self.edges_after(removed):
            if e & vbit:
                nb |= e
        return nb

    def cn(self, need: int) -> int:
        got = self._cn.get(need)
        if got is None:
            got = self._cn_search(need)
            self._cn[need] = got
        return got

    def _cn_search(self, need: int) -> int:
        if need == 0:
            return 0
        family = []
        covered = 0
        for e in self.edges:
            r = e & need
            if r and r not in family:
                family.append(r)
                covered |= r
        if covered & need != need:
            raise UncoverableError("vertex set not covered by any edge")
        best = len(family)
        states = 0

        def search(uncovered: int, used: int) -> None:
            nonlocal best, states
            states += 1
            if states > self.budget.max_states:
                raise BudgetExceededError("cover search exceeded the state budget")
            if used >= best:
                return
            if not uncovered:
                best = used
                return
            pivot = uncovered & -uncovered
            for e in family:
                if e & pivot:
                    search(uncovered & ~e, used + 1)

        search(need, 0)
        return best

    def fcn(self, need: int) -> Fraction:
        got = self._fcn.get(need)
        if got is None:
            members = [i for i in range(self.n) if need >> i & 1]
            family = [e & need for e in self.edges if e & need]
            covered = 0
            for e in family:
                covered |= e
            if covered & need != need:
                raise UncoverableError("vertex set not covered by any edge")
            if not members:
                got = Fraction(0)
            else:
                rows = [[Fraction(int(e >> i & 1)) for i in members] for e in family]
                got = _simplex_max(rows, [Fraction(1)] * len(family), [Fraction(1)] * len(members))
            self._fcn[need] = got
        return got

    def cost(self, removed: int, vbit: int, fractional: bool):
        nb = self.neighbourhood(removed, vbit)
        return self.fcn(nb) if fractional else self.cn(nb)


_FAMILY_TABLES: dict[tuple, _FamilyTable] = {}


def _family_table(n: int, edges: tuple[int, ...], budget: Budget) -> _FamilyTable:
    key = (n, edges, budget.max_states)
    got = _FAMILY_TABLES.get(key)
    if got is None:
        if len(_FAMILY_TABLES) > 1 << 18:
            _FAMILY_TABLES.clear()
        got = _FamilyTable(n, edges, budget)
        _FAMILY_TABLES[key] = got
    return got


class _OrderCost:
    """Step cost ``(removed_set, next_vertex) -> cover number`` for one width kind."""

    def __init__(self, vertices: Sequence[str], graphs: Sequence[Hypergraph], fractional: bool, budget: Budget):
        self.vertices = tuple(vertices)
        index = {v: i for i, v in enumerate(self.vertices)}
        self.fractional = fractional
        self.tables = []
        for g in graphs:
            masks = []
            for e in g.edges:
                m = 0
                for v in e:
                    m |= 1 << index[v]
                masks.append(m)
            self.tables.append(_family_table(len(self.vertices), tuple(sorted(set(masks))), budget))

    def key(self) -> tuple:
        return (self.vertices, self.fractional, tuple(sorted(t.edges for t in self.tables)))

    def cost(self, removed: int, vbit: int):
        worst = None
        for table in self.tables:
            c = table.cost(removed, vbit, self.fractional)
            if worst is None or c > worst:
                worst = c
        return worst


_BEST_ORDER_MEMO: dict[tuple, tuple] = {}


_KIND_FRACTIONAL = {"how": False, "fhow": True, "show": False, "sfhow": True, "bhow": False, "bfhow": True}


def width_of_order(h: Hypergraph | SignedHypergraph, kind: str, order: EliminationOrder, budget: Budget = DEFAULT_BUDGET):
    """Width of one elimination order under any of the six measures.

    Computed directly from the definition: a sequential elimination walk
    per member of the measure's hypergraph family.
    """
    fractional = _KIND_FRACTIONAL[kind]
    measure = fhow_width if fractional else how_width
    graphs = _graphs_for(h, kind, budget)
    seq = VarOrder(tuple(v for v in order if v in (graphs[0].vertices if graphs else frozenset())))
    width = Fraction(0) if fractional else 0
    for g in graphs:
        width = max(width, measure(g, seq, budget))
    return width


EXACT_SEARCH_MAX_VERTICES = 9


def best_order(
    h: Hypergraph | SignedHypergraph, kind: str = "how", budget: Budget = DEFAULT_BUDGET
) -> tuple[EliminationOrder, object, bool]:
    """Elimination order minimising the width, with an exactness flag.

    Small vertex sets are solved exactly by dynamic programming over
    removed-vertex subsets (the neighbourhood at a removal step depends
    only on the set removed before it).  Larger ones fall back to a
    greedy order whose width is still reported faithfully, flagged as an
    upper bound.
    """
    graphs = _graphs_for(h, kind, budget)
    verts = tuple(sorted(h.vertices))
    model = _OrderCost(verts, graphs, _KIND_FRACTIONAL[kind], budget)
    zero = Fraction(0) if _KIND_FRACTIONAL[kind] else 0
    n = len(verts)
    if n == 0:
        return VarOrder(()), zero, True

    if n <= EXACT_SEARCH_MAX_VERTICES:
        memo_key = model.key()
        hit = _BEST_ORDER_MEMO.get(memo_key)
        if hit is not None:
            return hit
        best: dict[int, tuple] = {0: (zero, ())}
        for removed in sorted(range(1, 1 << n), key=int.bit_count):
            winner = None
            bits = removed
            while bits:
                vbit = bits & -bits
                bits ^= vbit
                prior_width, prior_seq = best[removed ^ vbit]
                w = max(prior_width, model.cost(removed ^ vbit, vbit))
                if winner is None or w < winner[0]:
                    winner = (w, prior_seq + (verts[vbit.bit_length() - 1],))
            best[removed] = winner
        width, seq = best[(1 << n) - 1]
        result = (VarOrder(seq), width, True)
        if len(_BEST_ORDER_MEMO) > 1 << 18:
            _BEST_ORDER_MEMO.clear()
        _BEST_ORDER_MEMO[memo_key] = result
        return result

    # greedy: cheapest next removal, ties by name
    removed = 0
    seq = []
    width = zero
    for _ in range(n):
        pick, pick_cost = None, None
        for i, v in enumerate(verts):
            if removed >> i & 1:
                continue
            c = model.cost(removed, 1 << i)
            if pick_cost is None or c < pick_cost:
                pick, pick_cost = i, c
        seq.append(verts[pick])
        width = max(width, pick_cost)
        removed |= 1 << pick
    return VarOrder(tuple(seq)), width, False


def bhtw_bruteforce(h: Hypergraph, budget: Budget = DEFAULT_BUDGET) -> int:
    """Hereditary hypertree width: worst, over edge subsets, of the best order."""
    if len(h.vertices) > 8 or len(h.edges) > 6:
        raise BudgetExceededError("bhtw search is limited to 8 vertices and 6 edges")
    worst = 0
    for sub in _all_subhypergraphs(h, budget):
        _, width, exact = best_order(sub, "how", budget)
        assert exact
        worst = max(worst, width)
    return worst


# --- nest points, nest sets, beta-acyclicity --------------------------------

def _chain_ordered(sets: Iterable[frozenset[str]]) -> bool:
    chain = sorted(set(sets), key=len)
    return all(a <= b for a, b in zip(chain, chain[1:]))


def is_nest_point(h: Hypergraph, v: str) -> bool:
    """Whether the edges containing ``v`` form an inclusion chain."""
    if v not in h.vertices:
        raise VertexNotFoundError(f"vertex {v} not in hypergraph")
    return _chain_ordered(e for e in h.edges if v in e)


def _drop_vertices(h: Hypergraph, gone: set[str]) -> Hypergraph:
    edges = tuple(e - gone for e in h.edges if e - gone)
    return Hypergraph(h.vertices - gone, edges)


def beta_elim_order(h: Hypergraph) -> EliminationOrder | None:
    """Greedy nest-point elimination; ``None`` when none exists.

    Removing a vertex never destroys another vertex's nest-point status,
    so greedy removal is complete: it fails only on hypergraphs with no
    such order at all.
    """
    remaining = h
    seq = []
    while remaining.vertices:
        pick = None
        for v in sorted(remaining.vertices):
            if is_nest_point(remaining, v):
                pick = v
                break
        if pick is None:
            return None
        seq.append(pick)
        remaining = _drop_vertices(remaining, {pick})
    return VarOrder(tuple(seq))


def is_nest_set(h: Hypergraph, s: Iterable[str]) -> bool:
    """Whether the edges meeting ``s``, with ``s`` removed, form an inclusion chain."""
    block = frozenset(s)
    return _chain_ordered(e - block for e in h.edges if e & block)


def nsw_bruteforce(
    h: Hypergraph, k_max: int | None = None, budget: Budget = DEFAULT_BUDGET
) -> int | None:
    """Smallest width of a nest-set elimination order, up to ``k_max``.

    Memoised exhaustive search over remaining-vertex states; complete on
    the tiny instances it accepts.
    """
    if len(h.vertices) > 10:
        raise BudgetExceededError("nest-set search is limited to 10 vertices")
    verts = tuple(sorted(h.vertices))
    n = len(verts)
    if n == 0:
        return 0
    index = {v: i for i, v in enumerate(verts)}
    edge_masks = []
    for e in h.edges:
        m = 0
        for v in e:
            m |= 1 << index[v]
        if m and m not in edge_masks:
            edge_masks.append(m)
    cap = n if k_max is None else min(k_max, n)
    states = 0

    def nest_ok(edges: list[int], block: int) -> bool:
        touched = sorted(
            {e & ~block for e in edges if e & block}, key=int.bit_count
        )
        return all(a & ~b == 0 for a, b in zip(touched, touched[1:]))

    def subsets_of(mask: int, size: int):
        bits = [1 << i for i in range(n) if mask >> i & 1]
        for combo in itertools.combinations(bits, size):
            block = 0
            for b in combo:
                block |= b
            yield block

    def reducible(remaining: int, k: int, memo: dict) -> bool:
        nonlocal states
        if not remaining:
            return True
        hit = memo.get(remaining)
        if hit is not None:
            return hit
        states += 1
        if states > budget.max_states:
            raise BudgetExceededError("nest-set search exceeded the state budget")
        sub = [e & remaining for e in edge_masks if e & remaining]
        ok = False
        for size in range(1, k + 1):
            for block in subsets_of(remaining, size):
                if nest_ok(sub, block) and reducible(remaining & ~block, k, memo):
                    ok = True
                    break
            if ok:
                break
        memo[remaining] = ok
        return ok

    full = (1 << n) - 1
    for k in range(1, cap + 1):
        if reducible(full, k, {}):
            return k
    return None


# --- cloning and free-connex orders ------------------------------------------

def fresh_clone_name(u: str, taken: Iterable[str]) -> str:
    used = set(taken)
    candidate = u + "_c"
    while candidate in used:
        candidate += "c"
    return candidate


def clone_vertex(h: SignedHypergraph, u: str, clone_name: str | None = None) -> SignedHypergraph:
    """Add a twin of ``u`` to every edge containing ``u``, sign-preserving."""
    if u not in h.vertices:
        raise VertexNotFoundError(f"vertex {u} not in hypergraph")
    u2 = clone_name if clone_name is not None else fresh_clone_name(u, h.vertices)
    if u2 in h.vertices:
        raise ValueError(f"clone name {u2} already taken")

    def widen(edges):
        return tuple(e | {u2} if u in e else e for e in edges)

    return SignedHypergraph(h.vertices | {u2}, widen(h.pos_edges), widen(h.neg_edges))


def is_free_connex(order: EliminationOrder, s: Iterable[str]) -> bool:
    """Whether ``s`` is exactly a suffix of the elimination order."""
    block = frozenset(s)
    if not block:
        return True
    n = len(order.vars)
    if len(block) > n:
        return False
    return frozenset(order.vars[n - len(block):]) == block
