"""Discrete trace-operator norm against the closed form, over lengths and grid sizes.

    python3 scripts/trace_norm_study.py --lengths 0.5,1,2,5 --sizes 250,500,1000,2000
"""

import csv
import sys
import time

import click

from boundsys import discretize as dz
from boundsys.cli import fmt


def parse_list(text, cast):
    return [cast(x) for x in text.split(",") if x.strip()]


@click.command()
@click.option("--lengths", default="0.5,1,2", show_default=True)
@click.option("--sizes", default="250,500,1000,2000", show_default=True)
@click.option("-o", "--output", type=click.File("w"), default="-")
def main(lengths, sizes, output):
    w = csv.writer(output, lineterminator="\n")
    w.writerow(["l", "n", "estimate", "exact", "rel_error", "seconds"])
    for l in parse_list(lengths, float):
        exact = dz.trace_norm_closed_form(l)
        for n in parse_list(sizes, int):
            t0 = time.perf_counter()
            est = dz.trace_operator_norm(l, n)
            dt = time.perf_counter() - t0
            w.writerow([fmt(l), n, fmt(est), fmt(exact), fmt(abs(est - exact) / exact), f"{dt:.4f}"])


if __name__ == "__main__":
    sys.exit(main())
