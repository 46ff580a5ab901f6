"""Compare cheapest group orders of Hamiltonian-path instances with both the
stated and the derived cost limits on random graphs."""
import argparse
import itertools
import random

from rbpebble.engine import ModelSpec, Variant
from rbpebble.generators import UndirectedGraph, has_hamiltonian_path, reduce_hampath
from rbpebble.solvers import group_order_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", nargs="+", type=int, default=[3, 4, 5])
    ap.add_argument("--graphs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print("N,M,has_path,model,min_cost,derived_limit,stated_limit")
    for N in args.n:
        nodes = tuple("abcdefghij"[:N])
        for _ in range(args.graphs):
            edges = [p for p in itertools.combinations(nodes, 2) if rng.random() < 0.5]
            g = UndirectedGraph(nodes, frozenset(frozenset(e) for e in edges))
            for variant in Variant:
                if N < 4 and variant in (Variant.BASE, Variant.COMPCOST):
                    continue
                inst = reduce_hampath(g, ModelSpec(variant))
                _, cost = group_order_search(inst)
                print(f"{N},{g.M},{str(has_hamiltonian_path(g)).lower()},{variant.value},"
                      f"{cost},{inst.threshold},{inst.params['stated_threshold']}")


if __name__ == "__main__":
    main()
