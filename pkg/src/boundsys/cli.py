"""Command-line front end.

Exit codes: 0 success, 1 input error (bad JSON, bad options, unreadable
files), 2 mathematical invariant violation (non-Hermitian data, cardinality
mismatch, ...).  CSV floats use the shortest round-trip representation.
"""

import csv
import io
import json
import sys

import click
import numpy as np

from boundsys import discretize, linrel, secular, transport
from boundsys.errors import BoundsysError, InputError, InvariantError
from boundsys.metric_graph import (
    SkewCoupling,
    bc_from_dict,
    build_boundary_index,
    graph_from_dict,
    validate_graph,
)
from boundsys.serialize import decode_matrix, load_json

EXIT_INPUT = 1
EXIT_INVARIANT = 2


def fmt(x):
    return repr(float(x))


class BoundsysGroup(click.Group):
    """Group that maps usage and library errors onto the documented exit codes."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
            code = rv if isinstance(rv, int) else 0
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_INPUT
        except click.ClickException as exc:
            exc.show()
            code = EXIT_INPUT
        except InvariantError as exc:
            click.echo(f"error: {exc}", err=True)
            code = EXIT_INVARIANT
        except (InputError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            code = EXIT_INPUT
        except BoundsysError as exc:
            click.echo(f"error: {exc}", err=True)
            code = EXIT_INVARIANT
        if standalone_mode:
            sys.exit(code)
        return code


def _emit(text, out):
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _load_typed(path, tol, expected):
    d = load_json(path)
    obj = linrel.from_dict(d, tol)
    if not isinstance(obj, expected):
        raise InputError(f"{path}: expected {expected.__name__}, got {type(obj).__name__}")
    return obj


def _load_graph(path):
    d = load_json(path)
    if not isinstance(d, dict):
        raise InputError(f"{path}: graph file must be a JSON object")
    g = graph_from_dict(d)
    bc = bc_from_dict(d["bc"], g) if "bc" in d else None
    return g, bc, d


tol_option = click.option(
    "--tol", type=click.FloatRange(min=0, min_open=True), envvar="BOUNDSYS_TOL",
    default=linrel.DEFAULT_TOL, show_default=True, help="Rank/equality tolerance (env BOUNDSYS_TOL).",
)
out_option = click.option("-o", "--output", type=click.Path(dir_okay=False, writable=True), default=None,
                          help="Write to this file instead of stdout.")
field_option = click.option("--field", type=click.Choice(["real", "complex"]), default="real", show_default=True)


@click.group(cls=BoundsysGroup)
@click.version_option(package_name="artifact")
def cli():
    """Boundary systems, linear relations and metric-graph operators."""


# relation ------------------------------------------------------------------

@cli.group()
def relation():
    """Linear relations: classification, decomposition, Cayley map, pullback."""


@relation.command("check")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@tol_option
@out_option
def relation_check(path, tol, output):
    """Classification flags of a relation."""
    m = _load_typed(path, tol, linrel.LinearRelation)
    c = linrel.classify(m, tol)
    report = dict(c.flags())
    report.update(dims=list(m.dims), dim=m.space.dim, domain_dim=c.domain_dim)
    report["self_orthogonal"] = {
        k: v for k, v in [("skew", c.self_orthogonal_skew), ("symmetric", c.self_orthogonal_symmetric),
                          ("unitary", c.self_orthogonal_unitary)] if v is not None
    }
    _emit(_json_text(report), output)


@relation.command("decompose")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--flavor", type=click.Choice(["auto", *linrel.FLAVORS]), default="auto", show_default=True)
@tol_option
@out_option
def relation_decompose(path, flavor, tol, output):
    """(X, L) data of a self-adjoint or skew-self-adjoint relation."""
    m = _load_typed(path, tol, linrel.LinearRelation)
    if flavor == "auto":
        c = linrel.classify(m, tol)
        flavor = "self_adjoint" if c.self_adjoint else "skew_self_adjoint" if c.skew_self_adjoint else "self_adjoint"
    data = linrel.arens_decompose(m, flavor, tol)
    _emit(_json_text(data.to_dict()), output)


@relation.command("cayley")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--variant", type=click.Choice(["real_skew", "complex_symmetric"]), default="real_skew",
              show_default=True)
@tol_option
@out_option
def relation_cayley(path, variant, tol, output):
    """Apply the block Cayley map and report whether the image is a unitary graph."""
    m = _load_typed(path, tol, linrel.LinearRelation)
    cu = linrel.cayley_map(m, variant)
    out = {"variant": variant, "unitary": bool(linrel.is_unitary_graph(cu, tol)), "relation": cu.to_dict()}
    _emit(_json_text(out), output)


@relation.command("pullback")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@tol_option
@out_option
def relation_pullback(path, tol, output):
    """Preimage F^{-1}(V) for a file with keys V, F, w1, w2."""
    d = load_json(path)
    try:
        v = linrel.Subspace.from_dict(d["V"], tol)
        w1 = linrel.SesquilinearForm.from_dict(d["w1"], tol)
        w2 = linrel.SesquilinearForm.from_dict(d["w2"], tol)
        f = decode_matrix(d["F"], d.get("field", "real"))
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: pullback file needs keys V, F, w1, w2 ({exc})") from None
    u = linrel.pullback(v, f, w1, w2, tol)
    out = {
        "result": u.to_dict(),
        "V_self_orthogonal": bool(linrel.is_self_orthogonal(v, w2, tol)),
        "result_self_orthogonal": bool(linrel.is_self_orthogonal(u, w1, tol)),
    }
    _emit(_json_text(out), output)


# graph ---------------------------------------------------------------------

@cli.group()
def graph():
    """Metric graphs: validation, spectra, boundary identities."""


@graph.command("validate")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@out_option
def graph_validate(path, output):
    """Check graph invariants and report sizes and degrees."""
    g, bc, _ = _load_graph(path)
    r = validate_graph(g)
    out = {
        "l": r.l if np.isfinite(r.l) else None,
        "n_left": r.n_left,
        "n_right": r.n_right,
        "n_boundary": r.n_boundary,
        "degrees": {str(k): v for k, v in r.degrees.items()},
        "compact": g.compact,
        "boundary_index": [[e, f] for e, f in build_boundary_index(g)],
    }
    if isinstance(bc, SkewCoupling):
        bc.check_graph(g)
    _emit(_json_text(out), output)


def _require_bc(bc, path):
    if bc is None:
        raise InputError(f"{path}: no 'bc' block")
    return bc


@graph.command("spectrum-fd")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("-k", "--count", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("-n", "--points", type=click.IntRange(min=3), default=200, show_default=True,
              help="Grid points per edge.")
@click.option("--truncate", type=click.FloatRange(min=0, min_open=True), default=None,
              help="Truncation length for semi-infinite edges.")
@field_option
@click.option("--report", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Also write a JSON report here.")
@out_option
def graph_spectrum_fd(path, count, points, truncate, field, report, output):
    """Smallest eigenvalues of the finite-difference Laplacian (CSV)."""
    g, bc, _ = _load_graph(path)
    disc = discretize.make_grids(g, points, truncate)
    spec = discretize.assemble_laplacian_eig(disc, _require_bc(bc, path), count, field)
    rows = [(i, float(v), float(r)) for i, (v, r) in enumerate(zip(spec.eigenvalues, spec.residuals))]
    _emit(_csv_text(["index", "value", "residual"], rows), output)
    if report:
        rep = {
            "symmetry_residual": spec.symmetry_residual,
            "symmetry_tolerance": 10 * spec.h_max,
            "symmetric_ok": spec.symmetric_ok,
            "h_max": spec.h_max,
            "constraint_rows": spec.constraint_rows,
            "constraint_rank": spec.constraint_rank,
            "constrained_dim": spec.constrained_dim,
            "truncations": [{"edge": t.edge_id, "side": t.side, "length": t.length} for t in spec.truncations],
        }
        _emit(_json_text(rep), report)


@graph.command("spectrum-secular")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--lam-min", type=float, default=0.0, show_default=True)
@click.option("--lam-max", type=float, default=50.0, show_default=True)
@click.option("--grid", type=click.IntRange(min=3), default=2000, show_default=True)
@click.option("--threshold", type=click.FloatRange(min=0, min_open=True), default=1e-6, show_default=True,
              help="Relative singular-value cutoff for multiplicities.")
@field_option
@click.option("--scan", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Also write the (lambda, sigma_min) scan CSV here.")
@out_option
def graph_spectrum_secular(path, lam_min, lam_max, grid, threshold, field, scan, output):
    """Eigenvalues from the secular matrix (CSV with multiplicities)."""
    g, bc, _ = _load_graph(path)
    prob = secular.SecularProblem(g, _require_bc(bc, path), lam_min, lam_max, grid, threshold, field)
    eigs = secular.eigenvalue_scan(prob)
    rows = [(i, ev.value, ev.multiplicity, ev.sigma_min / ev.norm) for i, ev in enumerate(eigs)]
    _emit(_csv_text(["index", "value", "multiplicity", "sigma_min"], rows), output)
    if scan:
        lams = np.linspace(lam_min, lam_max, grid)
        _emit(_csv_text(["lambda", "sigma_min"], [(float(x), secular.scaled_sigma_min(prob, x)) for x in lams]), scan)


def _smooth_edge_functions(rng, n_edges):
    def one():
        c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        w = rng.uniform(0.5, 3.0, 3)
        p = rng.uniform(0.0, 2 * np.pi, 3)
        return lambda x: sum(ci * np.sin(wi * x + pi) for ci, wi, pi in zip(c, w, p))

    return [one() for _ in range(n_edges)]


def refinement_table(g, operators, ladder, seed):
    """Rows ``(operator, n, h_max, residual, order)`` for a grid-refinement ladder.

    ``order`` is ``log2`` of consecutive residual ratios scaled by the step
    ratio; it is empty for the first rung.
    """
    rng = np.random.default_rng(seed)
    fs = _smooth_edge_functions(rng, len(g.edges))
    gs = _smooth_edge_functions(rng, len(g.edges))
    rows = []
    for op in operators:
        prev = None
        for n in ladder:
            disc = discretize.make_grids(g, n)
            r = discretize.boundary_system_residual(disc, disc.sample(fs), disc.sample(gs), op)
            order = "" if prev is None else float(np.log(prev[1] / r) / np.log(prev[0] / disc.h_max))
            rows.append((op, n, disc.h_max, r, order))
            prev = (disc.h_max, r)
    return rows


def _ladder(text):
    try:
        values = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise click.BadParameter("ladder must be comma-separated integers") from None
    if len(values) < 2 or any(v < 3 for v in values):
        raise click.BadParameter("ladder needs at least two grid sizes, each >= 3")
    return values


@graph.command("bcheck")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--operator", type=click.Choice(["laplace", "derivative", "both"]), default="both", show_default=True)
@click.option("--ladder", default="51,101,201,401", show_default=True, help="Grid points per edge.")
@click.option("--seed", type=int, default=0, show_default=True)
@out_option
def graph_bcheck(path, operator, ladder, seed, output):
    """Green-identity residuals over a refinement ladder (CSV with observed orders)."""
    g, _, _ = _load_graph(path)
    ops = ["laplace", "derivative"] if operator == "both" else [operator]
    rows = refinement_table(g, ops, _ladder(ladder), seed)
    _emit(_csv_text(["operator", "n", "h", "residual", "order"], rows), output)


# transport -----------------------------------------------------------------

@cli.group("transport")
def transport_group():
    """Unitary transport on graphs with commensurable edge lengths."""


def initial_profile(spec, g):
    """Per-edge callables from an ``"initial"`` block (sine modes or a bump)."""
    spec = spec or {"type": "sine", "k": 1}
    kind = spec.get("type", "sine")
    if kind == "sine":
        k = float(spec.get("k", 1))
        return [lambda x, e=e: np.sin(2 * np.pi * k * (x - e.a) / e.length) for e in g.edges]
    if kind == "bump":
        edge, c, w = spec.get("edge"), float(spec.get("center", 0.5)), float(spec.get("width", 0.1))

        def bump(x):
            z = (x - c) / w
            out = np.zeros_like(x, dtype=float)
            inside = np.abs(z) < 1
            out[inside] = np.exp(-1 / (1 - z[inside] ** 2))
            return out

        return [bump if (edge is None or e.id == edge) else (lambda x: np.zeros_like(x)) for e in g.edges]
    raise InputError(f"unknown initial profile type {kind!r}")


@transport_group.command("run")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--t", "t_final", type=float, required=True, help="Target time (negative runs backward).")
@click.option("--h", "step", type=click.FloatRange(min=0, min_open=True), required=True, help="Time and grid step.")
@click.option("--trajectory", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Trajectory CSV (t, edge, index, re, im).")
@click.option("--norms", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Norm report CSV (t, norm, deviation).")
@click.option("--stride", type=click.IntRange(min=1), default=1, show_default=True)
@out_option
def transport_run(path, t_final, step, trajectory, norms, stride, output):
    """Evolve an initial profile and report norm conservation (JSON summary)."""
    g, bc, d = _load_graph(path)
    if not isinstance(_require_bc(bc, path), SkewCoupling):
        raise InputError(f"{path}: transport needs a 'skew_coupling' bc")
    state = transport.make_state(g, bc, step, initial_profile(d.get("initial"), g))
    states = transport.trajectory(state, t_final, stride)
    rep = transport.norm_report(states)
    if trajectory:
        rows = []
        for s in states:
            for e, vals in zip(g.edges, s.samples):
                for j, v in enumerate(vals):
                    rows.append((s.t, e.id, j, float(np.real(v)), float(np.imag(v))))
        _emit(_csv_text(["t", "edge", "index", "re", "im"], rows), trajectory)
    if norms:
        n0 = rep.series[0][1]
        _emit(_csv_text(["t", "norm", "deviation"], [(t, n, abs(n - n0)) for t, n in rep.series]), norms)
    final = states[-1]
    summary = {
        "steps": final.steps,
        "t": final.t,
        "norm_initial": rep.series[0][1],
        "norm_final": rep.series[-1][1],
        "max_deviation": rep.max_deviation,
        "max_relative_deviation": rep.max_relative_deviation,
        "max_abs_change": float(np.abs(final.vector - state.vector).max(initial=0.0)),
    }
    _emit(_json_text(summary), output)


def main():
    cli.main(prog_name="boundsys")


if __name__ == "__main__":
    main()
