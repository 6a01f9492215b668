#!/usr/bin/env python3
"""Differential fuzzing: both engines against the brute-force oracle.

Generates random signed queries and databases, sorts the brute-force
answers, and checks count plus every k-th access for the circuit engine
(raw and binarized) and the subtraction-based reduction engine.
"""

from __future__ import annotations

import argparse
import random
import sys

sys.path.insert(0, "tests")

from conftest import make_instance  # noqa: E402

from cqda.project import da_conjunctive  # noqa: E402
from cqda.query import eval_bruteforce  # noqa: E402
from cqda.reduction import signed_da_via_reduction  # noqa: E402
from cqda.relations import sort_lex  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iterations", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-vars", type=int, default=5)
    parser.add_argument("--max-atoms", type=int, default=4)
    parser.add_argument("--max-dom", type=int, default=4)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    accesses = 0
    for trial in range(args.iterations):
        inst = make_instance(rng, args.max_vars, args.max_atoms, args.max_dom)
        oracle = sort_lex(eval_bruteforce(inst.query, inst.db), inst.order, inst.db.domain)
        engines = {
            "circuit": da_conjunctive(inst.query, inst.db, inst.order, binarize=False),
            "binarized": da_conjunctive(inst.query, inst.db, inst.order, binarize=True),
            "reduction": signed_da_via_reduction(inst.query, inst.db, inst.order),
        }
        for name, engine in engines.items():
            if engine.count() != len(oracle):
                print(f"trial {trial}: {name} count {engine.count()} != {len(oracle)}")
                print(f"  query: {inst.query}")
                sys.exit(1)
            for k, expected in enumerate(oracle, 1):
                got = engine.kth(k)
                accesses += 1
                if got != expected:
                    print(f"trial {trial}: {name} kth({k}) = {dict(got)} != {dict(expected)}")
                    print(f"  query: {inst.query}")
                    sys.exit(1)
    print(f"ok: {args.iterations} instances, {accesses} accesses, engines agree")


if __name__ == "__main__":
    main()
