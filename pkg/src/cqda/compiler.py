"""Exhaustive DPLL compilation of signed queries into ordered circuits.

``dpll_compile`` walks the variables of its elimination order from the
largest down, branching on every domain value, so the circuit it emits
is ordered for the *reversed* order: that reversal is the significance
order direct access serves.  Recursive calls are cached by subquery
identity plus the assignment restricted to the subquery's variables;
Cartesian-product structure is detected by splitting the simplified
query into components connected through unassigned variables.

``binarize`` rewrites a database and query onto the two-value domain,
spending ceil(log2 |D|) bit variables per original variable.  The bit
order puts each variable's most significant bit first, which makes the
rewriting an order isomorphism on answers.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from .circuit import Circuit, circuit_size
from .errors import RankOutOfDomainError
from .query import Atom, SignedQuery, check_compatible, _trie_match
from .relations import Assignment, Database, Domain, Relation, VarOrder


@dataclass
class CompileStats:
    rec_calls: int = 0
    cache_hits: int = 0
    gates: int = 0
    edges: int = 0

    def to_dict(self) -> dict:
        return {
            "rec_calls": self.rec_calls,
            "cache_hits": self.cache_hits,
            "gates": self.gates,
            "edges": self.edges,
        }


class _Frame:
    """One suspended compilation call in the explicit DPLL stack."""

    __slots__ = ("key", "aids", "tau", "x", "d_idx", "edges", "dest", "children", "d_value")

    def __init__(self, key, aids, tau, x, dest):
        self.key = key
        self.aids = aids
        self.tau = tau
        self.x = x
        self.d_idx = 0
        self.edges = []
        self.dest = dest  # (list, slot) receiving the finished gate id
        self.children = None
        self.d_value = None


def dpll_compile(
    query: SignedQuery, db: Database, order: VarOrder
) -> tuple[Circuit, CompileStats]:
    """Compile the answers of a join query into an ordered circuit.

    ``order`` is the elimination order; it must cover the query
    variables (extra variables are allowed and stay unconstrained).  The
    result computes the answer set over ``order`` reversed, which is the
    universe stored on the circuit.
    """
    check_compatible(query, db)
    if not query.variables <= set(order.vars):
        raise ValueError("elimination order must cover every query variable")
    domain = db.domain
    circuit = Circuit(domain, order.reversed())
    stats = CompileStats()

    atoms = query.atoms
    arg_sets: list[tuple[str, ...]] = [a.args for a in atoms]
    rows_of: list[frozenset] = []
    tries: list[dict] = []
    levels: list[tuple[str, ...]] = []
    for a in atoms:
        rel: Relation = db.relations[a.symbol]
        perm = tuple(sorted(range(len(a.args)), key=lambda i: -order.position(a.args[i])))
        tries.append(rel.trie(perm))
        levels.append(tuple(a.args[i] for i in perm))
        rows_of.append(rel.rows)

    def atom_consistent(aid: int, tau: dict) -> bool:
        a = atoms[aid]
        if a.positive:
            return _trie_match(tries[aid], levels[aid], 0, tau)
        if all(v in tau for v in arg_sets[aid]):
            return tuple(tau[v] for v in arg_sets[aid]) not in rows_of[aid]
        return True

    def consistent(aids, tau: dict) -> bool:
        return all(atom_consistent(aid, tau) for aid in aids)

    def simplify_ids(aids, tau: dict):
        kept = []
        for aid in aids:
            a = atoms[aid]
            if a.positive or _trie_match(tries[aid], levels[aid], 0, tau):
                kept.append(aid)
        return kept

    def split_components(aids, tau: dict):
        open_of = {aid: [v for v in arg_sets[aid] if v not in tau] for aid in aids}
        by_var: dict[str, list[int]] = {}
        for aid in aids:
            for v in open_of[aid]:
                by_var.setdefault(v, []).append(aid)
        comps = []
        seen: set[int] = set()
        for start in aids:
            if start in seen or not open_of[start]:
                continue
            seen.add(start)
            stack = [start]
            block = []
            while stack:
                aid = stack.pop()
                block.append(aid)
                for v in open_of[aid]:
                    for other in by_var[v]:
                        if other not in seen:
                            seen.add(other)
                            stack.append(other)
            comps.append(tuple(sorted(block)))
        return comps

    vars_of_aids: dict[tuple, tuple[str, ...]] = {}

    def component_vars(aids) -> tuple[str, ...]:
        got = vars_of_aids.get(aids)
        if got is None:
            got = tuple(sorted({v for aid in aids for v in arg_sets[aid]}))
            vars_of_aids[aids] = got
        return got

    cache: dict[tuple, int] = {}
    stack: list[_Frame] = []

    def push_call(aids: tuple, tau: dict, dest) -> None:
        # caller guarantees (aids, tau) is consistent
        key = (aids, tuple(sorted(tau.items())))
        hit = cache.get(key)
        if hit is not None:
            stats.cache_hits += 1
            dest[0][dest[1]] = hit
            return
        stats.rec_calls += 1
        unassigned = [v for v in component_vars(aids) if v not in tau]
        if not unassigned:
            gate = circuit.top()
            cache[key] = gate
            dest[0][dest[1]] = gate
            return
        x = max(unassigned, key=order.position)
        stack.append(_Frame(key, aids, tau, x, dest))

    def drain() -> None:
        while stack:
            fr = stack[-1]
            if fr.children is not None and all(g is not None for g in fr.children):
                gate = fr.children[0] if len(fr.children) == 1 else circuit.add_product(fr.children)
                fr.edges.append((fr.d_value, gate))
                fr.children = None
                fr.d_idx += 1
            if fr.d_idx == len(domain.values):
                gate = circuit.add_decision(fr.x, fr.edges)
                cache[fr.key] = gate
                fr.dest[0][fr.dest[1]] = gate
                stack.pop()
                continue
            d = domain.values[fr.d_idx]
            tau2 = dict(fr.tau)
            tau2[fr.x] = d
            if not consistent(fr.aids, tau2):
                fr.edges.append((d, circuit.bot()))
                fr.d_idx += 1
                continue
            kept = simplify_ids(fr.aids, tau2)
            comps = split_components(kept, tau2)
            if not comps:
                fr.edges.append((d, circuit.top()))
                fr.d_idx += 1
                continue
            fr.children = [None] * len(comps)
            fr.d_value = d
            for slot, comp in reversed(list(enumerate(comps))):
                comp_tau = {v: tau2[v] for v in component_vars(comp) if v in tau2}
                push_call(comp, comp_tau, (fr.children, slot))

    all_aids = tuple(range(len(atoms)))
    if not consistent(all_aids, {}):
        circuit.set_output(circuit.bot())
    else:
        comps = split_components(tuple(simplify_ids(all_aids, {})), {})
        if not comps:
            circuit.set_output(circuit.top())
        else:
            results: list = [None] * len(comps)
            for slot, comp in enumerate(comps):
                push_call(comp, {}, (results, slot))
                drain()
            out = results[0] if len(results) == 1 else circuit.add_product(results)
            circuit.set_output(out)

    stats.gates = len(circuit.gates)
    stats.edges = circuit_size(circuit)
    return circuit, stats


# --- binarisation ------------------------------------------------------------

BIN_DOMAIN = Domain(("0", "1"))


@dataclass(frozen=True)
class BinCodec:
    """Bit-blasting codec between a domain and fixed-width bit variables.

    Each variable ``x`` becomes ``bits`` fresh variables ``x^1 .. x^b``
    where ``x^i`` carries bit ``i - 1`` of the value's 0-based rank, so
    ``x^1`` is the least significant bit.
    """

    source_domain: Domain
    bits: int
    variables: tuple[str, ...]

    def bit_name(self, var: str, i: int) -> str:
        return f"{var}^{i}"

    def bit_vars_lsb(self, var: str) -> tuple[str, ...]:
        return tuple(self.bit_name(var, i) for i in range(1, self.bits + 1))

    def bit_vars_msb(self, var: str) -> tuple[str, ...]:
        return tuple(self.bit_name(var, i) for i in range(self.bits, 0, -1))

    def encode_value(self, value: str) -> tuple[str, ...]:
        code = self.source_domain.rank(value) - 1
        return tuple(str((code >> i) & 1) for i in range(self.bits))

    def decode_value(self, bits_lsb: tuple[str, ...]) -> str:
        code = sum((1 << i) for i, b in enumerate(bits_lsb) if b == "1")
        if code >= len(self.source_domain):
            raise RankOutOfDomainError(f"bit pattern denotes rank {code + 1}, domain has {len(self.source_domain)}")
        return self.source_domain.value_at(code + 1)

    def encode_assignment(self, tau: Mapping[str, str]) -> Assignment:
        out: dict[str, str] = {}
        for var, value in tau.items():
            for name, bit in zip(self.bit_vars_lsb(var), self.encode_value(value)):
                out[name] = bit
        return Assignment(out)


def bits_needed(domain_size: int) -> int:
    """ceil(log2 n), floored at one bit so unary domains stay encodable."""
    return max(1, (domain_size - 1).bit_length())


def binarize(
    db: Database, q: SignedQuery, order: VarOrder
) -> tuple[Database, SignedQuery, VarOrder, BinCodec]:
    """Rewrite database, query and significance order onto domain {0, 1}.

    ``order`` is read as a significance order; each variable is replaced
    in place by its bit variables, most significant first, which keeps
    the lexicographic order of answers aligned with the original.
    Relation columns and atom arguments expand least-significant-first,
    mirroring how rows spell out their bits.

    When the domain size is not a power of two, some bit patterns decode
    to nothing; one negated validity atom per variable of ``order``
    forbids them.  Positive atoms already pin their variables' bits to
    stored rows, but variables seen only by negated atoms (or by no atom
    at all) would otherwise admit phantom answers.  Such an edge groups
    exactly one variable's bits, so signed widths are unaffected.
    """
    codec = BinCodec(db.domain, bits_needed(len(db.domain)), tuple(order.vars))
    b = codec.bits

    relations: dict[str, Relation] = {}
    for name, rel in db.relations.items():
        cols = tuple(f"c{j}" for j in range(len(rel.vars) * b))
        rows = frozenset(
            tuple(bit for value in row for bit in codec.encode_value(value))
            for row in rel.rows
        )
        relations[name] = Relation(cols, rows)

    bin_atoms = [
        Atom(a.positive, a.symbol, tuple(bit for v in a.args for bit in codec.bit_vars_lsb(v)))
        for a in q.atoms
    ]

    invalid = [
        tuple(str((code >> i) & 1) for i in range(b))
        for code in range(len(db.domain), 1 << b)
    ]
    if invalid:
        taken = set(relations)
        bit_cols = tuple(f"c{j}" for j in range(b))
        for var in order.vars:
            symbol = f"_dom_{var}"
            while symbol in taken:
                symbol = "_" + symbol
            taken.add(symbol)
            relations[symbol] = Relation(bit_cols, frozenset(invalid))
            bin_atoms.append(Atom(False, symbol, codec.bit_vars_lsb(var)))

    bin_db = Database(BIN_DOMAIN, relations)
    bin_free = None if q.free is None else frozenset(bit for v in q.free for bit in codec.bit_vars_lsb(v))
    bin_q = SignedQuery(tuple(bin_atoms), bin_free)

    bin_order = VarOrder(tuple(bit for v in order.vars for bit in codec.bit_vars_msb(v)))
    return bin_db, bin_q, bin_order, codec


def debin_tuple(t: Mapping[str, str], codec: BinCodec) -> Assignment:
    """Collapse a tuple over bit variables back onto the source domain."""
    out: dict[str, str] = {}
    for var in codec.variables:
        names = codec.bit_vars_lsb(var)
        present = [n for n in names if n in t]
        if not present:
            continue
        if len(present) != len(names):
            raise ValueError(f"tuple covers only some bits of {var}")
        out[var] = codec.decode_value(tuple(t[n] for n in names))
    return Assignment(out)


def compile_binarized(
    q: SignedQuery, db: Database, order: VarOrder
) -> tuple[Circuit, BinCodec, CompileStats]:
    """Binarize, then compile; the circuit lives on the bit variables.

    ``order`` is the elimination order on the original variables.  The
    circuit's universe is the bit significance order, so the k-th bit
    tuple decodes to the k-th original answer.
    """
    access = order.reversed()
    bin_db, bin_q, bin_access, codec = binarize(db, q, access)
    circuit, stats = dpll_compile(bin_q, bin_db, bin_access.reversed())
    return circuit, codec, stats
