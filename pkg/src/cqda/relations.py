"""Named tuples, relations and ordered domains, plus brute-force oracles.

Everything here works on explicit, fully materialised relations.  The
k-th-tuple routine is the reference oracle the circuit and reduction
engines are tested against; it deliberately avoids sorting and instead
walks the prefix-count decomposition one variable at a time.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

from .errors import OutOfRangeError

LT, EQ, GT = -1, 0, 1


@dataclass(frozen=True)
class Domain:
    """Finite totally ordered set of opaque values.

    The order is the declaration order of ``values`` and nothing else;
    ranks are 1-based.
    """

    values: tuple[str, ...]
    _pos: dict[str, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        pos = {v: i + 1 for i, v in enumerate(self.values)}
        if len(pos) != len(self.values):
            raise ValueError("domain values must be distinct")
        object.__setattr__(self, "_pos", pos)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)

    def __contains__(self, value: str) -> bool:
        return value in self._pos

    def rank(self, value: str) -> int:
        """Number of domain elements smaller or equal to ``value``."""
        return self._pos[value]

    def value_at(self, rank: int) -> str:
        if not 1 <= rank <= len(self.values):
            raise OutOfRangeError(f"rank {rank} outside 1..{len(self.values)}")
        return self.values[rank - 1]


@dataclass(frozen=True)
class VarOrder:
    """Sequence of distinct variable names; earlier means more significant."""

    vars: tuple[str, ...]
    _pos: dict[str, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        pos = {v: i for i, v in enumerate(self.vars)}
        if len(pos) != len(self.vars):
            raise ValueError("variable order must not repeat names")
        object.__setattr__(self, "_pos", pos)

    def __len__(self) -> int:
        return len(self.vars)

    def __iter__(self) -> Iterator[str]:
        return iter(self.vars)

    def __contains__(self, var: str) -> bool:
        return var in self._pos

    def position(self, var: str) -> int:
        return self._pos[var]

    def reversed(self) -> VarOrder:
        return VarOrder(self.vars[::-1])

    def restrict(self, names: Iterable[str]) -> VarOrder:
        keep = set(names)
        return VarOrder(tuple(v for v in self.vars if v in keep))

    def min_of(self, names: Iterable[str]) -> str:
        return min(names, key=self._pos.__getitem__)

    def max_of(self, names: Iterable[str]) -> str:
        return max(names, key=self._pos.__getitem__)


class Assignment(Mapping):
    """Immutable mapping from variable names to domain values."""

    __slots__ = ("_map", "_items")

    def __init__(self, mapping: Mapping[str, str] | Iterable[tuple[str, str]] = ()):
        m = dict(mapping)
        object.__setattr__(self, "_map", m)
        object.__setattr__(self, "_items", tuple(sorted(m.items())))

    def __getitem__(self, var: str) -> str:
        return self._map[var]

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._map))

    def __len__(self) -> int:
        return len(self._map)

    def __hash__(self) -> int:
        return hash(self._items)

    def __eq__(self, other) -> bool:
        if isinstance(other, Assignment):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}={d!r}" for v, d in self._items)
        return f"Assignment({inner})"

    def restrict(self, names: Iterable[str]) -> Assignment:
        keep = set(names)
        return Assignment({v: d for v, d in self._map.items() if v in keep})

    def extend(self, var: str, value: str) -> Assignment:
        return Assignment({**self._map, var: value})

    def compatible(self, other: Mapping[str, str]) -> bool:
        small, big = (self._map, other) if len(self) <= len(other) else (other, self._map)
        return all(big.get(v, d) == d for v, d in small.items())

    def joined(self, other: Mapping[str, str]) -> Assignment:
        """Union of two compatible assignments."""
        merged = dict(self._map)
        for v, d in other.items():
            if merged.setdefault(v, d) != d:
                raise ValueError(f"incompatible bindings for {v}")
        return Assignment(merged)


EMPTY_ASSIGNMENT = Assignment()


@dataclass(frozen=True)
class Relation:
    """Set of tuples over a fixed variable list.

    Rows are stored positionally, aligned with ``vars``.  Set semantics:
    duplicates are impossible by construction.
    """

    vars: tuple[str, ...]
    rows: frozenset[tuple[str, ...]]
    _tries: dict = field(default_factory=dict, init=False, compare=False, repr=False)

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("relation variables must be distinct")
        for row in self.rows:
            if len(row) != len(self.vars):
                raise ValueError("row width differs from variable list")

    @classmethod
    def from_rows(cls, vars: Iterable[str], rows: Iterable[Iterable[str]]) -> Relation:
        return cls(tuple(vars), frozenset(tuple(r) for r in rows))

    @classmethod
    def from_assignments(cls, vars: Iterable[str], tuples: Iterable[Mapping[str, str]]) -> Relation:
        vs = tuple(vars)
        return cls(vs, frozenset(tuple(t[v] for v in vs) for t in tuples))

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, var: str) -> int:
        return self.vars.index(var)

    def assignments(self) -> Iterator[Assignment]:
        for row in self.rows:
            yield Assignment(zip(self.vars, row))

    def rename(self, new_vars: Iterable[str]) -> Relation:
        return Relation(tuple(new_vars), self.rows)

    def trie(self, perm: tuple[int, ...]) -> dict:
        """Nested-dict prefix tree over columns taken in ``perm`` order.

        Memoised per permutation; a relation is immutable so the tree is
        built at most once for each column ordering.
        """
        cached = self._tries.get(perm)
        if cached is None:
            cached = {}
            for row in self.rows:
                node = cached
                for col in perm:
                    node = node.setdefault(row[col], {})
            self._tries[perm] = cached
        return cached


@dataclass(frozen=True, eq=False)
class Database:
    """Ordered domain plus named positional relations."""

    domain: Domain
    relations: dict[str, Relation]

    def __post_init__(self):
        for name, rel in self.relations.items():
            for row in rel.rows:
                for value in row:
                    if value not in self.domain:
                        raise ValueError(f"value {value!r} in {name} outside the domain")

    @property
    def size(self) -> int:
        """Total tuple count plus the domain size."""
        return sum(len(r) for r in self.relations.values()) + len(self.domain)


def join(r1: Relation, r2: Relation) -> Relation:
    """Natural join; a Cartesian product when no variables are shared."""
    shared = [v for v in r1.vars if v in r2.vars]
    out_vars = r1.vars + tuple(v for v in r2.vars if v not in r1.vars)
    k1 = [r1.column(v) for v in shared]
    k2 = [r2.column(v) for v in shared]
    extra = [i for i, v in enumerate(r2.vars) if v not in r1.vars]
    buckets: dict[tuple, list] = {}
    for row in r2.rows:
        buckets.setdefault(tuple(row[i] for i in k2), []).append(row)
    out = set()
    for row in r1.rows:
        for other in buckets.get(tuple(row[i] for i in k1), ()):
            out.add(row + tuple(other[i] for i in extra))
    return Relation(out_vars, frozenset(out))


def extended_union(r1: Relation, r2: Relation, domain: Domain) -> Relation:
    """Union after padding each side with all values of the missing variables."""
    out_vars = r1.vars + tuple(v for v in r2.vars if v not in r1.vars)

    def expand(rel: Relation) -> Iterator[tuple[str, ...]]:
        missing = [v for v in out_vars if v not in rel.vars]
        cols = {v: rel.column(v) for v in rel.vars}
        for row in rel.rows:
            for pad in itertools.product(domain.values, repeat=len(missing)):
                filled = dict(zip(missing, pad))
                yield tuple(row[cols[v]] if v in cols else filled[v] for v in out_vars)

    return Relation(out_vars, frozenset(itertools.chain(expand(r1), expand(r2))))


def select_prefix(r: Relation, tau: Mapping[str, str]) -> Relation:
    """Rows of ``r`` agreeing with ``tau`` on every variable ``tau`` binds."""
    cols = [(r.column(v), d) for v, d in tau.items()]
    return Relation(r.vars, frozenset(row for row in r.rows if all(row[c] == d for c, d in cols)))


def lex_compare(t1: Mapping[str, str], t2: Mapping[str, str], order: VarOrder, domain: Domain) -> int:
    """Compare two tuples over the same variables; returns LT, EQ or GT."""
    if set(t1) != set(t2):
        raise ValueError("tuples must bind the same variable set")
    for v in order:
        if v not in t1:
            continue
        a, b = domain.rank(t1[v]), domain.rank(t2[v])
        if a != b:
            return LT if a < b else GT
    return EQ


def sort_lex(r: Relation, order: VarOrder, domain: Domain) -> list[Assignment]:
    """All tuples of ``r`` in lexicographic order (full-sort oracle)."""
    sig = [r.column(v) for v in order if v in r.vars]
    rows = sorted(r.rows, key=lambda row: tuple(domain.rank(row[c]) for c in sig))
    return [Assignment(zip(r.vars, row)) for row in rows]


def kth_tuple_bruteforce(r: Relation, order: VarOrder, domain: Domain, k: int) -> Assignment:
    """The k-th tuple of ``r`` under the lexicographic order (1-based).

    Peels one variable at a time: bind the most significant variable to
    the smallest value whose prefix count reaches k, subtract the count
    of strictly smaller prefixes, recurse on the selected slice.
    """
    if k < 1 or k > len(r.rows):
        raise OutOfRangeError(f"k out of range (count={len(r.rows)})")
    rows = list(r.rows)
    bound: dict[str, str] = {}
    for var in order:
        if var not in r.vars:
            continue
        col = r.vars.index(var)
        tally: dict[str, int] = {}
        for row in rows:
            tally[row[col]] = tally.get(row[col], 0) + 1
        below = 0
        for d in domain.values:
            here = tally.get(d, 0)
            if below + here >= k:
                bound[var] = d
                k -= below
                rows = [row for row in rows if row[col] == d]
                break
            below += here
    return Assignment(bound)
