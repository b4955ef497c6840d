"""Influence decompositions and boundary geometry for a small voting rule.

Shows the exact influence identities (total = sum over single = sum over
pairs), the variance lower bound, and how boundary edge counts convert to
influence values.
"""

import math

from gslab import rankings as rk
from gslab import scf
from gslab.influence import (
    boundary_edges,
    influence_pair,
    influence_single,
    influence_total,
    variance_indicator,
)


def main() -> None:
    q, n = 3, 2
    f = scf.borda_voter1_tiebreak(q, n)
    print(f"rule: {f.kind}, q={q}, n={n}")
    for i in (1, 2):
        total = influence_total(f, i)
        print(f"\nvoter {i}: Inf = {total}")
        for a in range(1, q + 1):
            print(f"  Inf^{a} = {influence_single(f, i, a)}")
        pair_sum = sum(
            influence_pair(f, i, a, b)
            for a in range(1, q + 1)
            for b in range(1, q + 1)
            if a != b
        )
        print(f"  sum over ordered winner pairs: {pair_sum} (equals Inf)")
    print("\nvariances:")
    for a in range(1, q + 1):
        print(f"  Var[1_(f={a})] = {variance_indicator(f, a)}")

    fac = math.factorial(q)
    edges = boundary_edges(f, 1, 1, 2)
    print(f"\n|B_1^(1,2)| = {len(edges)} ordered pairs")
    print(f"as a probability: {len(edges)}/(q!)^(n+1) = {influence_pair(f, 1, 1, 2)}")
    e = edges[0]
    print(f"example edge: {rk.format_profile(e.x)}  ->  {rk.format_profile(e.y)}  (voter {e.i})")


if __name__ == "__main__":
    main()
