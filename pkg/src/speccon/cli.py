"""Command-line front end: protocol design, rate tables, simulations, sweeps.

All commands are seeded and byte-deterministic for fixed inputs. Tables are
rounded to 4 decimals; other CSV output carries 6 significant digits.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import click
import numpy as np

from . import filters, graphs, rates, sim
from .errors import SpecconError

TABLE_METHODS = ("lagrange", "chebyshev", "constant")


def _fmt6(x: float) -> str:
    return f"{x:.6g}"


def _parse_band(_ctx, _param, value) -> graphs.SpectralBand | None:
    if value is None:
        return None
    try:
        alpha, beta = (float(p) for p in value.split(","))
        return graphs.SpectralBand(alpha, beta)
    except (ValueError, SpecconError) as exc:
        raise click.BadParameter(f"expected 'alpha,beta' with 0 < alpha <= beta: {exc}")


def _parse_periods(_ctx, _param, value) -> tuple[int, ...]:
    try:
        periods = tuple(int(p) for p in value.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")
    if not periods or any(m < 1 for m in periods):
        raise click.BadParameter("periods must be positive integers")
    return periods


def parse_graph_spec(spec: str, seed: int | None = None) -> graphs.Graph:
    """Build or load a graph from a compact spec string.

    Forms: complete:N, star:N, cycle:N, path:N, bipartite:M,N,
    ws:N,K,P (Watts-Strogatz), er:N,P (connected Erdos-Renyi), file:PATH.
    """
    kind, _, arg = spec.partition(":")
    if kind == "file":
        return graphs.load_graph(arg)
    try:
        parts = arg.split(",") if arg else []
        if kind in ("complete", "star", "cycle", "path"):
            (n,) = parts
            return graphs.build_graph(kind, n=int(n))
        if kind in ("bipartite", "complete_bipartite"):
            m, n = parts
            return graphs.build_graph("complete_bipartite", m=int(m), n=int(n))
        if kind in ("ws", "watts_strogatz"):
            n, k, p = parts
            return graphs.build_graph("watts_strogatz", n=int(n), k=int(k), p=float(p), seed=seed)
        if kind in ("er", "random_connected"):
            n, p = parts
            return graphs.build_graph("random_connected", n=int(n), p=float(p), seed=seed)
    except ValueError as exc:
        raise click.BadParameter(f"bad graph spec {spec!r}: {exc}")
    raise click.BadParameter(f"unknown graph family in spec {spec!r}")


def bundled_spectrum(name: str = "smallworld12") -> np.ndarray:
    """Eigenvalue list shipped with the package (ascending, includes 0)."""
    with resources.files("speccon.data").joinpath(f"{name}.json").open() as fh:
        doc = json.load(fh)
    return np.asarray(doc["eigenvalues"], dtype=float)


def _design_for(method: str, band: graphs.SpectralBand, period: int) -> tuple[filters.ControlSequence, int]:
    """Sequence plus the step count that makes methods comparable at period M."""
    if method == "lagrange":
        return filters.design_lagrange(band, period), period
    if method == "chebyshev":
        return filters.design_chebyshev(band, period), period
    if method == "constant":
        return filters.design_constant(band), period
    raise click.BadParameter(f"unknown method {method!r}")


def _closed_rate(method: str, band: graphs.SpectralBand, period: int) -> float | None:
    if method == "lagrange":
        return filters.closed_rate_lagrange(band, period)
    if method == "chebyshev":
        return filters.closed_rate_chebyshev(band, period)
    if method == "constant":
        return filters.closed_rate_constant(band, period)
    return None


def _emit(lines: list[str], out: Path | None, filename: str) -> None:
    text = "\n".join(lines) + "\n"
    click.echo(text, nl=False)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text, encoding="utf-8")


band_option = click.option("--band", callback=_parse_band, default=None,
                           help="Uncertainty interval 'alpha,beta'.")
seed_option = click.option("--seed", type=int, default=None, help="Seed for random draws.")
format_option = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                             default="csv", show_default=True, help="Output format.")
out_option = click.option("--out", type=click.Path(path_type=Path), default=None,
                          help="Directory to write output files into.")


@click.group()
@click.version_option()
def main():
    """Design and analyze periodic spectrum-filter consensus protocols."""


@main.command()
@band_option
@click.option("--method", type=click.Choice(["lagrange", "chebyshev", "constant", "uniform_unknown"]),
              required=True)
@click.option("-M", "--period", "period", type=int, default=1, show_default=True)
@click.option("--beta-bar", type=float, default=None,
              help="Spectral radius bound for uniform_unknown.")
def design(band, method, period, beta_bar):
    """Design a gain sequence and print it as JSON (roots and rate on stderr)."""
    if period < 1:
        raise click.BadParameter("period must be >= 1")
    try:
        if method == "uniform_unknown":
            if beta_bar is None:
                raise click.BadParameter("uniform_unknown requires --beta-bar")
            seq = filters.design_uniform_unknown(beta_bar, period)
            gamma = None
        else:
            if band is None:
                raise click.BadParameter(f"{method} requires --band")
            seq, _ = _design_for(method, band, period)
            gamma = _closed_rate(method, band, period)
    except SpecconError as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps(filters.sequence_to_dict(seq), indent=2))
    click.echo("roots: " + " ".join(_fmt6(r) for r in seq.roots), err=True)
    if gamma is not None:
        click.echo(f"worst-case rate (M={period}): {_fmt6(gamma)}", err=True)


@main.command()
@band_option
@click.option("--periods", callback=_parse_periods, default="2,3,4,5", show_default=True)
@format_option
@out_option
def table2(band, periods, fmt, out):
    """Worst-case rates gamma_M per method over the band (4-decimal cells)."""
    band = band or graphs.SpectralBand(0.2, 12.8)
    cells = {m: [round(_closed_rate(m, band, p), 4) for p in periods] for m in TABLE_METHODS}
    if fmt == "json":
        doc = {"alpha": band.alpha, "beta": band.beta, "periods": list(periods), "rates": cells}
        _emit([json.dumps(doc, indent=2)], out, "table2.json")
        return
    lines = ["method," + ",".join(str(p) for p in periods)]
    lines += [m + "," + ",".join(f"{v:.4f}" for v in cells[m]) for m in TABLE_METHODS]
    _emit(lines, out, "table2.csv")


TABLE3_GRAPHS = ("star12", "cycle12", "path6", "smallworld12")


def _table3_eigenvalues(name: str) -> np.ndarray:
    if name == "star12":
        s = graphs.spectrum(graphs.build_graph("star", n=12))
    elif name == "cycle12":
        s = graphs.spectrum(graphs.build_graph("cycle", n=12))
    elif name == "path6":
        s = graphs.spectrum(graphs.build_graph("path", n=6))
    elif name == "smallworld12":
        return bundled_spectrum()[1:]
    else:
        raise click.BadParameter(f"unknown table graph {name!r}")
    return s.eigenvalues[1:]


@main.command()
@band_option
@click.option("--periods", callback=_parse_periods, default="2,3,4,5", show_default=True)
@format_option
@out_option
def table3(band, periods, fmt, out):
    """Exact rates rho_M per graph and method (4-decimal cells)."""
    band = band or graphs.SpectralBand(0.2, 12.8)
    try:
        rows = {}
        for gname in TABLE3_GRAPHS:
            eigs = _table3_eigenvalues(gname)
            for method in TABLE_METHODS:
                cells = []
                for period in periods:
                    seq, steps = _design_for(method, band, period)
                    report = rates.rate_on_eigenvalues(seq, eigs, steps=steps)
                    cells.append(round(report.exact_rate, 4))
                rows[(gname, method)] = cells
    except SpecconError as exc:
        raise click.ClickException(str(exc))
    if fmt == "json":
        doc = {
            "alpha": band.alpha, "beta": band.beta, "periods": list(periods),
            "rates": {g: {m: rows[(g, m)] for m in TABLE_METHODS} for g in TABLE3_GRAPHS},
        }
        _emit([json.dumps(doc, indent=2)], out, "table3.json")
        return
    lines = ["graph,method," + ",".join(str(p) for p in periods)]
    for gname in TABLE3_GRAPHS:
        for method in TABLE_METHODS:
            lines.append(f"{gname},{method}," + ",".join(f"{v:.4f}" for v in rows[(gname, method)]))
    _emit(lines, out, "table3.csv")


def _sweep_row(band, period, nodes, edge_prob, seed, graph_id):
    g = graphs.build_graph("random_connected", n=nodes, p=edge_prob, seed=[seed, graph_id])
    s = graphs.spectrum(g)
    if s.lambda_max > band.beta:
        g = graphs.Graph(nodes, g.adjacency * (band.beta / s.lambda_max))
        s = graphs.spectrum(g)
    row = [graph_id, s.lambda_2, s.lambda_max]
    for method in TABLE_METHODS:
        seq, steps = _design_for(method, band, period)
        row.append(rates.exact_rate(seq, s, steps=steps).exact_rate)
    return row, graphs.band_contains(s, band)


@main.command()
@band_option
@click.option("-M", "--period", "period", type=int, default=5, show_default=True)
@click.option("--trials", type=int, default=80, show_default=True)
@click.option("--nodes", type=int, default=100, show_default=True)
@click.option("--edge-prob", type=float, default=0.08, show_default=True)
@seed_option
@format_option
@out_option
def sweep(band, period, trials, nodes, edge_prob, seed, fmt, out):
    """Exact rates of all methods on seeded random connected graphs.

    Graphs whose spectral radius exceeds beta are rescaled by beta/lambda_N
    and rechecked. Rows are ordered by graph id; SPECCON_THREADS caps the
    worker count.
    """
    if trials < 1:
        raise click.BadParameter("trials must be >= 1")
    band = band or graphs.SpectralBand(0.2, 12.8)
    seed = 0 if seed is None else seed
    cap = int(os.environ.get("SPECCON_THREADS", "0") or 0)
    workers = max(1, min(trials, cap if cap > 0 else (os.cpu_count() or 1)))

    results: dict[int, list] = {}
    failures: dict[int, str] = {}

    def run(graph_id: int):
        try:
            results[graph_id] = _sweep_row(band, period, nodes, edge_prob, seed, graph_id)
        except SpecconError as exc:
            failures[graph_id] = str(exc)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run, range(trials)))

    header = "graph_id,lambda2,lambda_n,rho_lagrange,rho_chebyshev,rho_constant"
    rows = []
    docs = []
    for graph_id in range(trials):
        if graph_id in failures:
            continue
        (gid, l2, ln, r_lp, r_wo, r_xs), in_band = results[graph_id]
        rows.append(f"{gid},{_fmt6(l2)},{_fmt6(ln)},{_fmt6(r_lp)},{_fmt6(r_wo)},{_fmt6(r_xs)}")
        docs.append({"graph_id": gid, "lambda2": l2, "lambda_n": ln, "in_band": in_band,
                     "rho_lagrange": r_lp, "rho_chebyshev": r_wo, "rho_constant": r_xs})
    if fmt == "json":
        doc = {"alpha": band.alpha, "beta": band.beta, "period": period, "nodes": nodes,
               "edge_prob": edge_prob, "seed": seed, "rows": docs}
        _emit([json.dumps(doc, indent=2)], out, "sweep.json")
    else:
        _emit([header] + rows, out, "sweep.csv")
    for graph_id, message in sorted(failures.items()):
        click.echo(f"graph {graph_id}: {message}", err=True)
    if failures:
        sys.exit(1)


@main.command()
@band_option
@click.option("--methods", default="lagrange,chebyshev,constant", show_default=True,
              help="Comma-separated subset of lagrange,chebyshev,constant.")
@click.option("-M", "--period", "period", type=int, default=3, show_default=True)
@click.option("--samples", type=int, default=513, show_default=True)
@out_option
def response(band, methods, period, samples, out):
    """Filter response h(lambda) per method on [0, beta * 1.05] as CSV."""
    band = band or graphs.SpectralBand(0.2, 12.8)
    if samples < 2:
        raise click.BadParameter("samples must be >= 2")
    names = [m.strip() for m in methods.split(",") if m.strip()]
    try:
        columns = {}
        grid = np.linspace(0.0, band.beta * 1.05, samples)
        for name in names:
            seq, steps = _design_for(name, band, period)
            columns[name] = filters.eval_filter(seq, grid, steps)
    except SpecconError as exc:
        raise click.ClickException(str(exc))
    lines = ["lambda," + ",".join(f"h_{n}" for n in names)]
    for i, lam in enumerate(grid):
        lines.append(_fmt6(lam) + "," + ",".join(_fmt6(columns[n][i]) for n in names))
    _emit(lines, out, "response.csv")


@main.command(name="simulate")
@click.option("--graph", "graph_spec", required=True,
              help="Graph spec, e.g. star:12, bipartite:3,4, ws:12,4,0.3, file:g.json.")
@band_option
@click.option("--method",
              type=click.Choice(["lagrange", "chebyshev", "constant", "uniform_unknown", "finite_time"]),
              default=None, help="Design method (alternative to --sequence).")
@click.option("-M", "--period", "period", type=int, default=3, show_default=True)
@click.option("--beta-bar", type=float, default=None)
@click.option("--sequence", "sequence_file", type=click.Path(exists=True), default=None,
              help="Load the gain sequence from a JSON file.")
@click.option("--x0", default="uniform", show_default=True,
              help="Initial states: uniform | worst_eigenvector | file:PATH.")
@click.option("--steps", type=int, required=True)
@click.option("--tol", type=float, default=1e-9, show_default=True,
              help="Relative consensus tolerance.")
@click.option("--states", "with_states", is_flag=True, help="Include state columns in the trace CSV.")
@seed_option
@out_option
def simulate_cmd(graph_spec, band, method, period, beta_bar, sequence_file, x0, steps,
                 tol, with_states, seed, out):
    """Simulate the protocol on a graph; write trace CSV and summary JSON."""
    try:
        g = parse_graph_spec(graph_spec, seed)
        s = graphs.spectrum(g)
        if sequence_file is not None:
            seq = filters.load_sequence(sequence_file)
        elif method == "finite_time":
            seq = filters.design_finite_time(graphs.distinct_nonzero_eigenvalues(s))
        elif method == "uniform_unknown":
            if beta_bar is None:
                raise click.BadParameter("uniform_unknown requires --beta-bar")
            seq = filters.design_uniform_unknown(beta_bar, period)
        elif method is not None:
            if band is None:
                raise click.BadParameter(f"{method} requires --band")
            seq, _ = _design_for(method, band, period)
        else:
            raise click.BadParameter("provide --method or --sequence")

        report = rates.exact_rate(seq, s)
        if x0 == "uniform":
            x_init = sim.uniform_initial_states(g.n, seed)
        elif x0 == "worst_eigenvector":
            idx = int(np.searchsorted(s.eigenvalues, report.argmax_eigenvalue))
            x_init = s.eigenvectors[:, idx]
        elif x0.startswith("file:"):
            x_init = np.asarray(json.loads(Path(x0[5:]).read_text(encoding="utf-8")), dtype=float)
        else:
            raise click.BadParameter(f"unknown x0 mode {x0!r}")

        trace = sim.simulate(g, seq, x_init, steps)
        try:
            ratios = sim.measured_period_ratios(trace, seq.period)
            measured, omitted = list(ratios.ratios), list(ratios.omitted)
        except SpecconError:
            measured, omitted = [], []  # trace shorter than two periods
        summary = {
            "graph": graph_spec,
            "n": g.n,
            "method": seq.method,
            "period": seq.period,
            "steps": steps,
            "seed": seed,
            "x0_mode": x0,
            "average": trace.average,
            "consensus_time": sim.consensus_time(trace, tol),
            "predicted_rate": report.exact_rate,
            "argmax_lambda": report.argmax_eigenvalue,
            "measured_ratios": measured,
            "omitted_periods": omitted,
        }
    except SpecconError as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps(summary, indent=2))
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "trace.csv").write_text(
            "\n".join(sim.trace_csv_lines(trace, with_states)) + "\n", encoding="utf-8")
        (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")


@main.group()
def graph():
    """Generate or inspect graphs."""


@graph.command()
@click.argument("spec")
@seed_option
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Write the graph JSON to this file instead of stdout.")
def generate(spec, seed, out):
    """Generate a graph from SPEC (e.g. star:12, ws:12,4,0.3) as JSON."""
    try:
        g = parse_graph_spec(spec, seed)
    except SpecconError as exc:
        raise click.ClickException(str(exc))
    text = json.dumps(graphs.graph_to_dict(g), indent=2)
    if out is None:
        click.echo(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")


@graph.command()
@click.argument("spec")
@format_option
@seed_option
def inspect(spec, fmt, seed):
    """Summarize a graph: size, degree, spectrum (csv) or key facts (json)."""
    try:
        g = parse_graph_spec(spec, seed)
        s = graphs.spectrum(g)
    except SpecconError as exc:
        raise click.ClickException(str(exc))
    if fmt == "csv":
        click.echo("\n".join(graphs.spectrum_csv_lines(s)))
        return
    iu, _, w = graphs.edge_arrays(g)
    click.echo(json.dumps({
        "n": g.n,
        "edges": int(iu.size),
        "total_weight": float(w.sum()),
        "max_degree": g.max_degree,
        "connected": s.is_connected(),
        "lambda_2": s.lambda_2,
        "lambda_max": s.lambda_max,
    }, indent=2))


if __name__ == "__main__":
    main()
