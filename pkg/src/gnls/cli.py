"""Command-line interface.

Subcommands: ``solve`` one instance, ``bench`` an experiment plan, ``stats``
a Wilcoxon comparison of result CSVs, ``inspect-marks`` to dump a selector's
mark set (and optionally the full inference graph), and ``generate`` to
write random instances.
"""

from __future__ import annotations

import glob as globmod
import json
import sys
import time
from pathlib import Path

import click

from .bench import (ExperimentPlan, ResultTable, VariantSpec, compare_variants,
                    emit_report, parse_results_csv, run_experiment)
from .bks import BksRegistry
from .construction import clarke_wright, nearest_neighbor
from .guidance import PRESETS, GuidanceConfig, GuidanceOracle, mark
from .instance import generate_instance, load_instance, parse_instance, write_instance
from .gnn import build_graph, decode_marks, forward, load_weights
from .lns import LnsConfig, run_lns
from .solution import format_solution, gap, solution_to_json
from .stats import wilcoxon_one_tailed


@click.group()
def main():
    """CVRP solver: LNS with a learned node selector guiding the destroy phase."""


def _guidance_from_opts(selector, weights, threshold, aspiration, quantile,
                        preset, remark, remark_every, knn, s0_only) -> GuidanceConfig | None:
    if selector == "null" and preset is None:
        return None
    if preset is not None:
        threshold, aspiration = PRESETS[preset]
    return GuidanceConfig(
        threshold=threshold, p_theta=aspiration, remark_policy=remark,
        remark_every=remark_every, selector=selector,
        weights_path=weights, quantile=quantile, knn=knn, s0_only=s0_only)


_selector_opts = [
    click.option("--selector", type=click.Choice(["null", "heuristic", "gnn"]),
                 default="null", show_default=True,
                 help="Node selector guiding the destroy phase."),
    click.option("--weights", type=click.Path(exists=True), default=None,
                 help="Weight container for the gnn selector."),
    click.option("--threshold", type=float, default=0.8, show_default=True,
                 help="Edge probability threshold t."),
    click.option("--aspiration", type=float, default=0.65, show_default=True,
                 help="Tabu aspiration probability p_theta."),
    click.option("--quantile", type=float, default=0.5, show_default=True,
                 help="Shortest-edge quantile for the heuristic selector."),
    click.option("--preset", type=click.Choice(sorted(PRESETS)), default=None,
                 help="Use a bundled (threshold, aspiration) preset."),
    click.option("--remark", type=click.Choice(["once", "every_k", "on_new_best"]),
                 default="once", show_default=True),
    click.option("--remark-every", type=int, default=1000, show_default=True),
    click.option("--knn", type=int, default=25, show_default=True,
                 help="k for the inference graph's nearest-neighbor edges."),
    click.option("--s0-only", is_flag=True,
                 help="Restrict the inference graph to initial-solution edges."),
]


def _with_opts(opts):
    def deco(fn):
        for opt in reversed(opts):
            fn = opt(fn)
        return fn
    return deco


@main.command()
@click.argument("instance", type=click.Path(exists=True))
@_with_opts(_selector_opts)
@click.option("--iterations", type=int, default=100_000, show_default=True)
@click.option("--time-limit", type=float, default=None, help="Seconds; optional.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--construction", type=click.Choice(["cw", "nn"]), default="cw",
              show_default=True)
@click.option("--repair", type=click.Choice(["greedy", "regret2"]), default="greedy",
              show_default=True)
@click.option("--save-initial", type=click.Path(), default=None,
              help="Write the initial solution to this file.")
@click.option("--save-solution", type=click.Path(), default=None,
              help="Write the best solution to this file.")
@click.option("--trace-csv", type=click.Path(), default=None,
              help="Write the per-iteration trace CSV.")
@click.option("--json", "json_path", type=click.Path(), default=None,
              help="Write a JSON result record.")
def solve(instance, selector, weights, threshold, aspiration, quantile, preset,
          remark, remark_every, knn, s0_only, iterations, time_limit, seed,
          construction, repair, save_initial, save_solution, trace_csv, json_path):
    """Solve one CVRPLIB instance."""
    inst = load_instance(instance)
    t0 = time.perf_counter()
    start = clarke_wright(inst) if construction == "cw" else nearest_neighbor(inst)
    if save_initial:
        Path(save_initial).write_text(format_solution(start))
    gcfg = _guidance_from_opts(selector, weights, threshold, aspiration, quantile,
                               preset, remark, remark_every, knn, s0_only)
    oracle = GuidanceOracle(gcfg, inst) if gcfg is not None else None
    cfg = LnsConfig(max_iterations=iterations, time_budget=time_limit,
                    rng_seed=seed, repair=repair)
    best, trace = run_lns(inst, start, cfg, guidance=oracle)
    wall = time.perf_counter() - t0
    bks = BksRegistry.bundled().get(inst.name)
    g = gap(best.total_cost, bks) if bks else None
    click.echo(f"instance   {inst.name} (N={inst.n}, Q={inst.capacity})")
    click.echo(f"start      {start.total_cost}")
    click.echo(f"best       {best.total_cost}")
    if g is not None:
        click.echo(f"gap        {g:.3f}%  (bks {bks})")
    click.echo(f"iterations {len(trace.iteration)}")
    click.echo(f"time       {wall:.2f}s")
    if save_solution:
        Path(save_solution).write_text(format_solution(best))
    if trace_csv:
        trace.to_csv(trace_csv)
    if json_path:
        Path(json_path).write_text(solution_to_json(best, gap_pct=g, seed=seed,
                                                    time_s=round(wall, 3)))


@main.command()
@click.option("--seed", type=int, required=True)
@click.option("--n", type=int, required=True, help="Number of customers.")
@click.option("--depot", type=click.Choice(["central", "edge", "random"]),
              default="random", show_default=True)
@click.option("--demand-min", type=int, default=1, show_default=True)
@click.option("--demand-max", type=int, default=10, show_default=True)
@click.option("--capacity", type=int, default=100, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="Output file (defaults to stdout).")
def generate(seed, n, depot, demand_min, demand_max, capacity, out):
    """Generate a deterministic random instance."""
    inst = generate_instance(seed, n, depot, (demand_min, demand_max), capacity)
    if out:
        write_instance(inst, out)
        click.echo(f"wrote {inst.name} to {out}")
    else:
        from .instance import format_instance
        sys.stdout.write(format_instance(inst))


def _parse_plan_file(path) -> dict:
    opts: dict[str, list[str]] = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.ClickException(f"plan line {ln}: expected 'key = value'")
        key, _, value = line.partition("=")
        opts.setdefault(key.strip().lower(), []).append(value.strip())
    return opts


@main.command()
@click.option("--plan", type=click.Path(exists=True), default=None,
              help="Plan file with 'key = value' lines.")
@click.option("--instances", multiple=True, help="Instance files or globs.")
@click.option("--variant", "variants", multiple=True,
              type=click.Choice(["baseline", "guided"]),
              help="Variants to run (repeatable).")
@_with_opts(_selector_opts)
@click.option("--runs", type=int, default=5, show_default=True)
@click.option("--iterations", type=int, default=100_000, show_default=True)
@click.option("--time-limit", type=float, default=None)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--bands", default=None,
              help="Size bands for the summary, e.g. '100-200,204-491'.")
@click.option("--out", type=click.Path(), default="bench-out", show_default=True)
def bench(plan, instances, variants, selector, weights, threshold, aspiration,
          quantile, preset, remark, remark_every, knn, s0_only, runs, iterations,
          time_limit, workers, alpha, bands, out):
    """Run an experiment plan and write results.csv / summary.txt / stats.json."""
    if plan:
        opts = _parse_plan_file(plan)
        instances = tuple(opts.get("instances", [])) or instances
        variants = tuple(opts.get("variant", [])) or variants
        one = lambda key, cur, cast: cast(opts[key][-1]) if key in opts else cur
        selector = one("selector", selector, str)
        weights = one("weights", weights, str)
        threshold = one("threshold", threshold, float)
        aspiration = one("aspiration", aspiration, float)
        quantile = one("quantile", quantile, float)
        preset = one("preset", preset, str)
        remark = one("remark", remark, str)
        remark_every = one("remark_every", remark_every, int)
        knn = one("knn", knn, int)
        s0_only = one("s0_only", s0_only, lambda v: v.lower() in ("1", "true", "yes"))
        runs = one("runs", runs, int)
        iterations = one("iterations", iterations, int)
        time_limit = one("time_limit", time_limit, float)
        workers = one("workers", workers, int)
        alpha = one("alpha", alpha, float)
        bands = one("bands", bands, str)
        out = one("out", out, str)
    paths: list[str] = []
    for pattern in instances:
        hits = sorted(globmod.glob(pattern))
        paths.extend(hits if hits else [pattern])
    if not paths:
        raise click.ClickException("no instances given")
    if not variants:
        variants = ("baseline", "guided")
    specs = []
    for v in variants:
        if v == "baseline":
            specs.append(VariantSpec("baseline"))
        else:
            gcfg = _guidance_from_opts(selector if selector != "null" else "heuristic",
                                       weights, threshold, aspiration, quantile,
                                       preset, remark, remark_every, knn, s0_only)
            specs.append(VariantSpec("guided", guidance=gcfg))
    plan_obj = ExperimentPlan(instances=paths, variants=specs, runs=runs,
                              iterations=iterations, time_limit=time_limit,
                              workers=workers)
    table = run_experiment(plan_obj)
    tests = []
    names = [s.name for s in specs]
    if "baseline" in names and "guided" in names:
        pairs, _ = compare_variants(table, "baseline", "guided")
        tests.append(("guided < baseline", wilcoxon_one_tailed(pairs)))
    band_ranges = None
    name_to_n = None
    if bands:
        band_ranges = [tuple(int(x) for x in part.split("-")) for part in bands.split(",")]
        name_to_n = {}
        for p in paths:
            inst = load_instance(p)
            name_to_n[inst.name] = inst.n
    written = emit_report(table, tests, out, alpha=alpha, bands=band_ranges,
                          name_to_n=name_to_n)
    for key, p in written.items():
        click.echo(f"{key}: {p}")
    for name, res in tests:
        if res.ok:
            click.echo(f"wilcoxon [{name}]: W+={res.statistic} p={res.p_value:.4f} "
                       f"({res.method}) significant@{alpha}: {res.significant(alpha)}")
        else:
            click.echo(f"wilcoxon [{name}]: {res.reason}")


@main.command()
@click.argument("csvs", nargs=-1, type=click.Path(exists=True), required=True)
@click.option("--baseline", default="baseline", show_default=True)
@click.option("--variant", default="guided", show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="stats.json path.")
def stats(csvs, baseline, variant, alpha, out):
    """Wilcoxon signed-rank comparison over result CSVs (per-instance mean gap)."""
    records = []
    for path in csvs:
        records.extend(parse_results_csv(Path(path).read_text()).records)
    table = ResultTable(records)
    pairs, names = compare_variants(table, baseline, variant)
    res = wilcoxon_one_tailed(pairs)
    payload = {
        "comparison": f"{variant} < {baseline}",
        "instances": names,
        "n_used": res.n_used,
        "statistic": res.statistic,
        "p_value": res.p_value,
        "method": res.method,
        "alpha": alpha,
        "significant": res.significant(alpha),
        "reason": res.reason,
    }
    click.echo(json.dumps(payload, indent=2))
    if out:
        Path(out).write_text(json.dumps(payload, indent=2))


@main.command("inspect-marks")
@click.argument("instance", type=click.Path(exists=True))
@_with_opts(_selector_opts)
@click.option("--construction", type=click.Choice(["cw", "nn"]), default="cw",
              show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Marks JSON path.")
@click.option("--dump-graph", type=click.Path(), default=None,
              help="Also dump the inference graph and edge probabilities.")
def inspect_marks(instance, selector, weights, threshold, aspiration, quantile,
                  preset, remark, remark_every, knn, s0_only, construction, out,
                  dump_graph):
    """Show which customers a selector would mark for an instance."""
    inst = load_instance(instance)
    start = clarke_wright(inst) if construction == "cw" else nearest_neighbor(inst)
    gcfg = _guidance_from_opts(selector, weights, threshold, aspiration, quantile,
                               preset, remark, remark_every, knn, s0_only)
    if gcfg is None:
        gcfg = GuidanceConfig(selector="null")
    probs = None
    g = None
    if gcfg.selector == "gnn":
        model = load_weights(gcfg.weights_path)
        g = build_graph(inst, start, k=gcfg.knn, include_knn=not gcfg.s0_only)
        probs = forward(model, g)
        marks = decode_marks(probs, g, gcfg.threshold)
    else:
        marks = mark(gcfg, inst, start)
    payload = {
        "instance": inst.name,
        "n": inst.n,
        "selector": marks.source,
        "threshold": marks.threshold,
        "initial_cost": start.total_cost,
        "marked_count": len(marks),
        "marked": sorted(marks.marked),
    }
    click.echo(f"{inst.name}: {len(marks)}/{inst.n} customers marked "
               f"({marks.source}, threshold {marks.threshold})")
    if out:
        Path(out).write_text(json.dumps(payload, indent=2))
    if dump_graph:
        if g is None:
            g = build_graph(inst, start, k=gcfg.knn, include_knn=not gcfg.s0_only)
        dump = {
            "instance": inst.name,
            "node_ids": g.node_ids.tolist(),
            "node_features": g.node_features.tolist(),
            "edge_src": g.edge_src.tolist(),
            "edge_dst": g.edge_dst.tolist(),
            "edge_distance": g.edge_distance.tolist(),
            "edge_kind": g.edge_kind.tolist(),
            "s0_edge_mask": g.s0_edge_mask.astype(int).tolist(),
            "edge_probs": None if probs is None else probs.tolist(),
            "marks": payload["marked"],
            "threshold": marks.threshold,
        }
        Path(dump_graph).write_text(json.dumps(dump))
        click.echo(f"graph dumped to {dump_graph}")


if __name__ == "__main__":
    main()
