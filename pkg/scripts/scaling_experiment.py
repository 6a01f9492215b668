#!/usr/bin/env python3
"""Circuit growth of the inequality query, with and without binarization.

The query ``A(x1), B(x2), !R(x1,x2)`` with ``R`` the diagonal forces the
raw compiler to spell out one subtree per domain value (no caching ever
fires), so its circuit grows quadratically with the domain.  On the
bit-encoded database the negated atom is discarded as soon as one bit
differs, caching kicks in and growth drops to roughly d log d.
"""

from __future__ import annotations

import argparse
import time

from cqda.access import count, preprocess
from cqda.circuit import circuit_size
from cqda.compiler import compile_binarized, dpll_compile
from cqda.query import parse_query
from cqda.relations import Database, Domain, Relation, VarOrder


def inequality_instance(d: int) -> Database:
    dom = Domain(tuple(str(i) for i in range(d)))
    return Database(
        dom,
        {
            "A": Relation.from_rows(("c0",), [(v,) for v in dom.values]),
            "B": Relation.from_rows(("c0",), [(v,) for v in dom.values]),
            "R": Relation.from_rows(("c0", "c1"), [(v, v) for v in dom.values]),
        },
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--domains", default="16,32,64,128,256,512",
                        help="comma-separated domain sizes")
    parser.add_argument("--skip-direct-above", type=int, default=1024,
                        help="skip the quadratic compile beyond this size")
    args = parser.parse_args()

    query = parse_query("Q(*) :- A(x1), B(x2), !R(x1,x2).")
    order = VarOrder(("x1", "x2"))
    header = f"{'d':>6} {'answers':>10} {'bin size':>9} {'bin calls':>9} {'bin s':>7} {'raw size':>9} {'raw s':>7}"
    print(header)
    print("-" * len(header))
    for d in (int(s) for s in args.domains.split(",")):
        db = inequality_instance(d)
        t0 = time.perf_counter()
        circuit, _, stats = compile_binarized(query, db, order.reversed())
        bin_time = time.perf_counter() - t0
        answers = count(circuit, preprocess(circuit))
        assert answers == d * d - d
        if d <= args.skip_direct_above:
            t0 = time.perf_counter()
            plain, _ = dpll_compile(query, db, order.reversed())
            raw_time = time.perf_counter() - t0
            raw_size = str(circuit_size(plain))
            raw_s = f"{raw_time:7.2f}"
        else:
            raw_size, raw_s = "-", "-"
        print(
            f"{d:>6} {answers:>10} {circuit_size(circuit):>9} {stats.rec_calls:>9} "
            f"{bin_time:7.2f} {raw_size:>9} {raw_s:>7}"
        )


if __name__ == "__main__":
    main()
