"""Optimal cost against red-pebble budget for the two-control-group chain."""
import argparse
import sys

from rbpebble.engine import ModelSpec, Variant
from rbpebble.generators import gen_tradeoff_dag
from rbpebble.solvers import curve_to_csv, tradeoff_curve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--m", nargs="+", type=int, default=[5, 7, 9])
    ap.add_argument("--model", default="oneshot", choices=[v.value for v in Variant])
    args = ap.parse_args()
    out = sys.stdout
    out.write("d,m," + curve_to_csv([]).strip() + ",closed_form\n")
    for m in args.m:
        dag = gen_tradeoff_dag(args.d, m)
        for R, cost, ok in tradeoff_curve(dag, ModelSpec(Variant(args.model)),
                                          args.d + 2, 2 * args.d + 2):
            i = R - args.d - 2
            # each middle chain node swaps d - i control pebbles in and out
            closed = 2 * (args.d - i) * (m - 2) if args.d > i else 0
            out.write(f"{args.d},{m},{R},{cost.numerator},{cost.denominator},"
                      f"{str(ok).lower()},{closed}\n")


if __name__ == "__main__":
    main()
