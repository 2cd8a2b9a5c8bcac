#!/usr/bin/env python3
"""Profile the alternating-least-squares rank probe on reference states.

Prints the best residual at each probed rank so the convergence cliff is
visible: the residual stays large up to one below the product-term count
and collapses at the count itself.  The flat triple's rank-2 row shows the
border-rank plateau (small but firmly above the convergence tolerance).
"""

import argparse

from loccsim.invariants import PartyTensor, ProbeConfig, cp_rank_probe
from loccsim.prebuilt import bipartite_catalysis_pair
from loccsim.states import Register, ghz, w_state

ABC = Register.of([(1, "A"), (2, "B"), (3, "C")])


def profile(name: str, state, max_rank: int, config: ProbeConfig) -> None:
    print(f"=== {name} ===")
    t = PartyTensor.from_state(state)
    for r in range(1, max_rank + 1):
        probe = cp_rank_probe(t, r, config)
        marker = "converged" if probe.converged else ""
        print(f"  r={r}: residual {probe.best_residual:.3e}  {marker}")
    print()


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--restarts", type=int, default=ProbeConfig().restarts)
    ap.add_argument("--seed", type=lambda s: int(s, 0), default=ProbeConfig().seed)
    args = ap.parse_args()

    config = ProbeConfig(restarts=args.restarts, seed=args.seed)
    profile("flat triple", w_state(ABC), 3, config)
    profile("balanced triple", ghz(ABC), 2, config)

    source, target = bipartite_catalysis_pair()
    profile("flat triple + pair", source, 6, config)
    profile("balanced triple + pair", target, 4, config)


if __name__ == "__main__":
    main()
