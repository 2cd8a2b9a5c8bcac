#!/usr/bin/env python3
"""Run the catalysis feasibility checks for the bundled state pairs.

Covers the pair-catalyst question (balanced pair shared by B and C) and
both triple-catalyst questions (a flat or balanced triple as catalyst).
Each verdict prints the per-party ranks, the product-term estimates, and
the notes explaining what the numbers do and do not prove.
"""

import argparse
import time

from loccsim.convert import catalysis_verdict
from loccsim.prebuilt import bipartite_catalysis_pair, tripartite_catalysis_pair


def show(name: str, source, target) -> None:
    start = time.perf_counter()
    v = catalysis_verdict(source, target)
    elapsed = time.perf_counter() - start
    print(f"=== {name} ({elapsed:.1f}s) ===")
    for party, s, t in v.party_ranks:
        print(f"  rank[{party}]: source {s}, target {t}")
    if v.product_term_obstruction:
        ob = v.product_term_obstruction
        tag = " (heuristic)" if ob.heuristic else ""
        print(f"  product terms: source {ob.source_terms}, "
              f"target {ob.target_terms}{tag}")
    for note in v.notes:
        print(f"  note: {note}")
    print(f"  verdict: {v.feasible}")
    print()


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "--skip-triples",
        action="store_true",
        help="only run the fast pair-catalyst check",
    )
    args = ap.parse_args()

    show("pair catalyst on B-C", *bipartite_catalysis_pair())
    if not args.skip_triples:
        show("flat-triple catalyst", *tripartite_catalysis_pair("w"))
        show("balanced-triple catalyst", *tripartite_catalysis_pair("ghz"))


if __name__ == "__main__":
    main()
