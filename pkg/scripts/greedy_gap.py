"""Greedy cost against the exact optimum (small grids) or the diagonal
schedule (large grids) on the misguiding group grid."""
import argparse
import json

from rbpebble.engine import ModelSpec, Variant, validate_trace
from rbpebble.generators import (
    diagonal_order, gen_greedy_grid, grid_group_labels, grid_order_trace, group_visit_order,
)
from rbpebble.solvers import GreedyPolicy, GreedyRule, greedy_pebble, solve_exact

ONESHOT = ModelSpec(Variant.ONESHOT)


def run(l, k, kp, exact):
    dag = gen_greedy_grid(l, k, kp)
    R = k + 1
    labels = grid_group_labels(dag)
    row = {"l": l, "k": k, "k_prime": kp, "n": dag.n}
    for rule in GreedyRule:
        tr = greedy_pebble(dag, ONESHOT, R, GreedyPolicy(rule))
        row[f"greedy_{rule.value}"] = str(validate_trace(dag, ONESHOT, R, tr).total)
        row[f"order_{rule.value}"] = [labels[i] for i in group_visit_order(dag, ONESHOT, tr)]
    diag = grid_order_trace(dag, diagonal_order(l))
    row["diagonal"] = str(validate_trace(dag, ONESHOT, R, diag).total)
    if exact:
        res = solve_exact(dag, ONESHOT, R)
        row["optimum"] = str(res.cost)
        row["exhausted"] = res.exhausted
    return row


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--exact-max-l", type=int, default=3)
    args = ap.parse_args()
    for l, k, kp in [(2, 6, 4), (3, 6, 4), (4, 10, 7), (8, 40, 36)]:
        print(json.dumps(run(l, k, kp, exact=l <= args.exact_max_l)))


if __name__ == "__main__":
    main()
