"""Grid-refinement study: boundary-identity residuals and eigenvalue errors.

Writes two CSV tables, one for the Green/boundary identities on the sample
graphs and one for FD eigenvalues against the secular solver.

    python3 scripts/refinement_orders.py --out-dir results/
"""

import csv
import math
from pathlib import Path

import click
import numpy as np

from boundsys import discretize as dz
from boundsys import secular as sc
from boundsys.cli import fmt, refinement_table
from boundsys.metric_graph import Shorthand, cycle_graph, interval_graph, star_graph

GRAPHS = {
    "edge": interval_graph(0.0, 1.0),
    "star": star_graph([1.0, 1.3, 0.8]),
    "cycle": cycle_graph([1.0, 2.0]),
}

SPECTRAL = {
    "interval_dirichlet": (interval_graph(0.0, math.pi), "dirichlet", 0.5, 30.0, 5),
    "star3_kirchhoff": (star_graph([1.0] * 3), "kirchhoff", -0.5, 70.0, 8),
    "cycle2_kirchhoff": (cycle_graph([1.0, 1.0]), "kirchhoff", -0.5, 170.0, 8),
}


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


@click.command()
@click.option("--ladder", default="51,101,201,401,801", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True)
def main(ladder, seed, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sizes = [int(x) for x in ladder.split(",")]

    rows = []
    for name, g in GRAPHS.items():
        for op, n, h, res, order in refinement_table(g, ("laplace", "derivative"), sizes, seed):
            rows.append([name, op, n, fmt(h), fmt(res), "" if order == "" else fmt(order)])
    write(out / "bcheck_orders.csv", ["graph", "operator", "n", "h", "residual", "order"], rows)

    rows = []
    for name, (g, bc, lo, hi, k) in SPECTRAL.items():
        exact = np.array(sc.expand_multiplicities(sc.eigenvalue_scan(sc.SecularProblem(g, Shorthand(bc), lo, hi, 4000)))[:k])
        prev = None
        for n in sizes:
            spec = dz.assemble_laplacian_eig(dz.make_grids(g, n), Shorthand(bc), k)
            err = float(np.abs(spec.eigenvalues - exact).max())
            order = "" if prev is None else fmt(math.log(prev[1] / err) / math.log(prev[0] / spec.h_max))
            rows.append([name, n, fmt(spec.h_max), fmt(err), order])
            prev = (spec.h_max, err)
    write(out / "eigen_orders.csv", ["problem", "n", "h", "max_abs_error", "order"], rows)
    click.echo(f"wrote {out / 'bcheck_orders.csv'} and {out / 'eigen_orders.csv'}")


if __name__ == "__main__":
    main()
