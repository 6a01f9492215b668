"""Direct access for signed queries by reduction to positive queries.

This is a second, independent engine used to cross-validate the circuit
pipeline.  It peels negated atoms one at a time: answers with atom
``!R`` equal answers without it minus answers with ``R`` made positive,
and set difference lifts to direct access through ranking plus binary
search.  Providers expose ``count()`` and ``kth(k)`` over a common
universe and significance order; derived providers memoise both
directions because the nested binary searches revisit indices heavily.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

from .errors import OutOfRangeError
from .project import da_conjunctive
from .query import SignedQuery
from .relations import Assignment, Database, Domain, Relation, VarOrder, lex_compare, sort_lex


@dataclass(frozen=True)
class QnnSpec:
    """Choice of negated atoms to flip positive (`n1`) and to keep (`n2`)."""

    n1: frozenset[int]
    n2: frozenset[int]

    def __post_init__(self):
        if self.n1 & self.n2:
            raise ValueError("flipped and kept atom sets must be disjoint")


class ExplicitProvider:
    """Direct access over a materialised relation; the small-case oracle."""

    def __init__(self, rel: Relation, order: VarOrder, domain: Domain):
        self.universe = order
        self.domain = domain
        self._sorted = sort_lex(rel, order, domain)

    def count(self) -> int:
        return len(self._sorted)

    def kth(self, k: int) -> Assignment:
        if not 1 <= k <= len(self._sorted):
            raise OutOfRangeError(f"k out of range (count={len(self._sorted)})")
        return self._sorted[k - 1]


def rank_via_da(provider, t: Mapping[str, str]) -> int:
    """Rank of ``t`` among the provider's tuples (largest smaller when absent)."""
    lo, hi = 0, provider.count()
    order, domain = provider.universe, provider.domain
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if lex_compare(provider.kth(mid), t, order, domain) <= 0:
            lo = mid
        else:
            hi = mid - 1
    return lo


@dataclass(eq=False)
class SubtractedProvider:
    """Direct access to ``S2 minus S1`` given providers for S1 subset of S2.

    The k-th element is found by binary search over ranks of S2: a
    candidate at S2-rank ``r`` has difference-rank ``r`` minus its
    S1-rank, and that difference is nondecreasing in ``r``.
    """

    big: object
    small: object
    _kth_cache: dict[int, Assignment] = field(default_factory=dict)

    @property
    def universe(self) -> VarOrder:
        return self.big.universe

    @property
    def domain(self) -> Domain:
        return self.big.domain

    def count(self) -> int:
        return self.big.count() - self.small.count()

    def kth(self, k: int) -> Assignment:
        if not 1 <= k <= self.count():
            raise OutOfRangeError(f"k out of range (count={self.count()})")
        hit = self._kth_cache.get(k)
        if hit is not None:
            return hit
        lo, hi = 1, self.big.count()
        while lo < hi:
            mid = (lo + hi) // 2
            t = self.big.kth(mid)
            if mid - rank_via_da(self.small, t) >= k:
                hi = mid
            else:
                lo = mid + 1
        result = self.big.kth(lo)
        self._kth_cache[k] = result
        return result


def subtract_da(big, small) -> SubtractedProvider:
    return SubtractedProvider(big, small)


class _MemoProvider:
    """Memoising wrapper so repeated binary-search probes hit a dict."""

    def __init__(self, inner):
        self.inner = inner
        self.universe = inner.universe
        self.domain = inner.domain
        self._count: int | None = None
        self._kth: dict[int, Assignment] = {}

    def count(self) -> int:
        if self._count is None:
            self._count = self.inner.count()
        return self._count

    def kth(self, k: int) -> Assignment:
        got = self._kth.get(k)
        if got is None:
            got = self.inner.kth(k)
            self._kth[k] = got
        return got


def positive_part(q: SignedQuery, flipped: frozenset[int]) -> SignedQuery:
    """The positive query keeping ``flipped`` negated atoms as positives."""
    negatives = [i for i, a in enumerate(q.atoms) if not a.positive]
    drop = set(negatives) - flipped
    atoms = tuple(
        a.as_positive() if i in flipped else a
        for i, a in enumerate(q.atoms)
        if i not in drop
    )
    return SignedQuery(atoms, None)


def qnn_da(
    q: SignedQuery,
    spec: QnnSpec,
    db: Database,
    order: VarOrder,
    base,
    _memo: dict | None = None,
):
    """Provider for the query with ``n1`` flipped positive and ``n2`` kept.

    Recurses on the kept set: keeping ``!R`` means subtracting, from the
    answers without the atom, the answers with ``R`` positive.  ``base``
    builds a provider for any purely positive combination.
    """
    memo = {} if _memo is None else _memo
    key = (spec.n1, spec.n2)
    got = memo.get(key)
    if got is not None:
        return got
    if not spec.n2:
        provider = _MemoProvider(base(spec.n1))
    else:
        r = max(spec.n2)
        rest = spec.n2 - {r}
        keep = qnn_da(q, QnnSpec(spec.n1, rest), db, order, base, memo)
        flip = qnn_da(q, QnnSpec(spec.n1 | {r}, rest), db, order, base, memo)
        provider = SubtractedProvider(keep, flip)
    memo[key] = provider
    return provider


def signed_da_via_reduction(
    q: SignedQuery, db: Database, order: VarOrder, *, binarize: bool = True
):
    """End-to-end second engine: every negated atom peeled by subtraction."""

    def base(flipped: frozenset[int]):
        return da_conjunctive(positive_part(q, flipped), db, order, binarize=binarize)

    negatives = frozenset(i for i, a in enumerate(q.atoms) if not a.positive)
    return qnn_da(q, QnnSpec(frozenset(), negatives), db, order, base)
