"""Lowest eigenvalue of the truncated Z-graph with growing delta strengths.

Both solvers are run for each truncation ``N``; the minimum keeps dropping,
so the limiting operator is not bounded below.

    python3 scripts/z_graph_trend.py --truncations 2,3,5,8 -n 100
"""

import csv
import sys

import click

from boundsys import discretize as dz
from boundsys import secular as sc
from boundsys.cli import fmt
from boundsys.metric_graph import z_graph


@click.command()
@click.option("--truncations", default="2,3,5,8", show_default=True)
@click.option("-n", "--points", default=100, show_default=True, help="grid points per edge")
@click.option("--grid", default=4000, show_default=True, help="secular scan points")
@click.option("-o", "--output", type=click.File("w"), default="-")
def main(truncations, points, grid, output):
    w = csv.writer(output, lineterminator="\n")
    w.writerow(["N", "edges", "fd_min", "secular_min", "minus_alpha_sq"])
    for n in (int(x) for x in truncations.split(",")):
        g, spec = z_graph(n)
        fd = dz.assemble_laplacian_eig(dz.make_grids(g, points), spec, 1).eigenvalues[0]
        eigs = sc.eigenvalue_scan(sc.SecularProblem(g, spec, -4.0 * n * n - 20.0, 0.0, grid))
        sec = eigs[0].value if eigs else float("nan")
        # the degree-one end vertex with coupling 2N carries a bound state near -(2N)^2
        w.writerow([n, len(g.edges), fmt(fd), fmt(sec), fmt(-float(2 * n) ** 2)])


if __name__ == "__main__":
    sys.exit(main())
