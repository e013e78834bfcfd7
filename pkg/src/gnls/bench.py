"""Experiment orchestration: seeded repeat runs, aggregation, reports.

Each (instance, variant) cell is solved ``runs`` times with seeds 0..runs-1
(run index minus one).  Runs can execute in a process pool; aggregation is
keyed, so worker scheduling cannot change the results.  Per-run failures
become error records instead of aborting the table.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .bks import BksRegistry
from .construction import clarke_wright, nearest_neighbor
from .guidance import GuidanceConfig, GuidanceOracle
from .instance import Instance, format_instance, parse_instance
from .lns import LnsConfig, run_lns
from .solution import gap
from .stats import WilcoxonResult, wilcoxon_one_tailed


@dataclass
class VariantSpec:
    name: str
    guidance: GuidanceConfig | None = None
    constructor: str = "cw"  # "cw" | "nn"
    repair: str = "greedy"


@dataclass
class ExperimentPlan:
    instances: list  # file paths and/or Instance objects
    variants: list[VariantSpec]
    runs: int = 5
    iterations: int = 100_000
    time_limit: float | None = None
    workers: int = 1
    k_ls: int = 10

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.variants:
            raise ValueError("at least one variant is required")


@dataclass
class RunRecord:
    instance: str
    variant: str
    run: int  # 1-based; seed = run - 1
    seed: int
    cost: int | None
    gap: float | None
    time_s: float | None
    depot_kind: str | None = None
    error: str | None = None


@dataclass
class ResultTable:
    records: list[RunRecord] = field(default_factory=list)

    def aggregate(self) -> list[dict]:
        cells: dict[tuple[str, str], list[RunRecord]] = {}
        for rec in self.records:
            cells.setdefault((rec.instance, rec.variant), []).append(rec)
        rows = []
        for (inst, var) in sorted(cells):
            recs = [r for r in cells[(inst, var)] if r.error is None]
            row = {"instance": inst, "variant": var,
                   "runs": len(cells[(inst, var)]), "failures":
                   len(cells[(inst, var)]) - len(recs)}
            if recs:
                costs = [r.cost for r in recs]
                row["avg_cost"] = sum(costs) / len(costs)
                row["best_cost"] = min(costs)
                gaps = [r.gap for r in recs if r.gap is not None]
                row["avg_gap"] = sum(gaps) / len(gaps) if gaps else None
                row["best_gap"] = min(gaps) if gaps else None
                times = [r.time_s for r in recs]
                row["avg_time_s"] = sum(times) / len(times)
                row["depot_kind"] = recs[0].depot_kind
            rows.append(row)
        return rows

    def mean_metric_by_instance(self, variant: str) -> dict[str, float]:
        """Per-instance mean gap for a variant (mean cost where gaps are missing)."""
        out: dict[str, float] = {}
        per_inst: dict[str, list[RunRecord]] = {}
        for rec in self.records:
            if rec.variant == variant and rec.error is None:
                per_inst.setdefault(rec.instance, []).append(rec)
        for inst, recs in per_inst.items():
            gaps = [r.gap for r in recs if r.gap is not None]
            if gaps:
                out[inst] = sum(gaps) / len(gaps)
            else:
                out[inst] = sum(r.cost for r in recs) / len(recs)
        return out


def _solve_task(args) -> RunRecord:
    (inst_text, inst_name, depot_kind, variant, run_idx, iterations,
     time_limit, k_ls, bks_cost) = args
    seed = run_idx - 1
    try:
        inst = parse_instance(inst_text)
        inst.depot_kind = depot_kind
        t0 = time.perf_counter()
        start = clarke_wright(inst) if variant.constructor == "cw" else nearest_neighbor(inst)
        oracle = GuidanceOracle(variant.guidance, inst) if variant.guidance else None
        cfg = LnsConfig(max_iterations=iterations, time_budget=time_limit,
                        rng_seed=seed, repair=variant.repair, k_ls=k_ls)
        best, _ = run_lns(inst, start, cfg, guidance=oracle)
        wall = time.perf_counter() - t0
        g = gap(best.total_cost, bks_cost) if bks_cost else None
        return RunRecord(inst_name, variant.name, run_idx, seed, best.total_cost,
                         g, wall, depot_kind)
    except Exception as exc:  # recorded, never aborts the table
        return RunRecord(inst_name, variant.name, run_idx, seed, None, None,
                         None, depot_kind, error=f"{type(exc).__name__}: {exc}")


def _instance_payload(entry) -> tuple[str, str, str | None]:
    if isinstance(entry, Instance):
        return format_instance(entry), entry.name, entry.depot_kind
    text = Path(entry).read_text()
    inst = parse_instance(text)
    return text, inst.name, inst.depot_kind


def run_experiment(plan: ExperimentPlan, bks: BksRegistry | None = None) -> ResultTable:
    if bks is None:
        bks = BksRegistry.bundled()
    tasks = []
    for entry in plan.instances:
        text, name, depot_kind = _instance_payload(entry)
        for variant in plan.variants:
            for run_idx in range(1, plan.runs + 1):
                tasks.append((text, name, depot_kind, variant, run_idx,
                              plan.iterations, plan.time_limit, plan.k_ls,
                              bks.get(name)))
    if plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            records = list(pool.map(_solve_task, tasks))
    else:
        records = [_solve_task(t) for t in tasks]
    records.sort(key=lambda r: (r.instance, r.variant, r.run))
    return ResultTable(records)


def compare_variants(table: ResultTable, baseline: str, variant: str
                     ) -> tuple[list[tuple[float, float]], list[str]]:
    """Per-instance (baseline mean, variant mean) pairs for the Wilcoxon test."""
    base = table.mean_metric_by_instance(baseline)
    var = table.mean_metric_by_instance(variant)
    names = sorted(set(base) & set(var))
    return [(base[k], var[k]) for k in names], names


# -- report files -------------------------------------------------------------

def results_csv_text(table: ResultTable) -> str:
    lines = ["instance,variant,run,seed,cost,gap,time_s,error"]
    for r in table.records:
        cost = "" if r.cost is None else r.cost
        g = "" if r.gap is None else f"{r.gap:.6f}"
        t = "" if r.time_s is None else f"{r.time_s:.3f}"
        err = "" if r.error is None else r.error.replace(",", ";")
        lines.append(f"{r.instance},{r.variant},{r.run},{r.seed},{cost},{g},{t},{err}")
    return "\n".join(lines) + "\n"


def parse_results_csv(text: str) -> ResultTable:
    records = []
    lines = [ln for ln in text.splitlines() if ln.strip()]
    for ln in lines[1:]:
        parts = ln.split(",")
        inst, variant, run, seed, cost, g, t = parts[:7]
        err = parts[7] if len(parts) > 7 and parts[7] else None
        records.append(RunRecord(
            inst, variant, int(run), int(seed),
            int(float(cost)) if cost else None,
            float(g) if g else None,
            float(t) if t else None,
            error=err))
    return ResultTable(records)


def _size_band(name_to_n: dict[str, int], inst: str, bands) -> str | None:
    n = name_to_n.get(inst)
    if n is None:
        return None
    for lo, hi in bands:
        if lo <= n <= hi:
            return f"{lo}-{hi}"
    return None


def summary_text(table: ResultTable, bands=None, name_to_n=None) -> str:
    """Human-readable aligned table; avg costs to 1 decimal, gaps to 3."""
    rows = table.aggregate()
    header = f"{'instance':<24} {'variant':<16} {'avg cost':>12} {'best cost':>10} " \
             f"{'avg gap':>8} {'best gap':>8} {'time(s)':>8}"
    out = [header, "-" * len(header)]
    for row in rows:
        if "avg_cost" not in row:
            out.append(f"{row['instance']:<24} {row['variant']:<16} "
                       f"{'all runs failed':>12}")
            continue
        ag = "-" if row["avg_gap"] is None else f"{row['avg_gap']:.3f}"
        bg = "-" if row["best_gap"] is None else f"{row['best_gap']:.3f}"
        out.append(f"{row['instance']:<24} {row['variant']:<16} "
                   f"{row['avg_cost']:>12.1f} {row['best_cost']:>10} "
                   f"{ag:>8} {bg:>8} {row['avg_time_s']:>8.2f}")
    if bands and name_to_n:
        out.append("")
        out.append("size bands (avg gap per variant)")
        cells: dict[tuple[str, str], list[float]] = {}
        for row in rows:
            band = _size_band(name_to_n, row["instance"], bands)
            if band is None or row.get("avg_gap") is None:
                continue
            cells.setdefault((band, row["variant"]), []).append(row["avg_gap"])
        for (band, variant) in sorted(cells):
            vals = cells[(band, variant)]
            out.append(f"  {band:<12} {variant:<16} {sum(vals)/len(vals):.3f}")
    kinds = {}
    for row in rows:
        if row.get("depot_kind") and row.get("avg_gap") is not None:
            kinds.setdefault((row["depot_kind"], row["variant"]), []).append(row["avg_gap"])
    if kinds:
        out.append("")
        out.append("depot position (avg gap per variant)")
        for (kind, variant) in sorted(kinds):
            vals = kinds[(kind, variant)]
            out.append(f"  {kind:<12} {variant:<16} {sum(vals)/len(vals):.3f}")
    out.append("")
    return "\n".join(out)


def emit_report(table: ResultTable, tests: list[tuple[str, WilcoxonResult]],
                out_dir, alpha: float = 0.05, bands=None, name_to_n=None,
                traces: dict | None = None) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    paths["results"] = out_dir / "results.csv"
    paths["results"].write_text(results_csv_text(table))
    paths["summary"] = out_dir / "summary.txt"
    paths["summary"].write_text(summary_text(table, bands=bands, name_to_n=name_to_n))
    payload = []
    for name, res in tests:
        payload.append({
            "comparison": name,
            "n_used": res.n_used,
            "statistic": res.statistic,
            "p_value": res.p_value,
            "method": res.method,
            "alpha": alpha,
            "significant": res.significant(alpha),
            "reason": res.reason,
        })
    paths["stats"] = out_dir / "stats.json"
    paths["stats"].write_text(json.dumps(payload, indent=2))
    if traces is not None:
        paths["traces"] = out_dir / "traces.json"
        paths["traces"].write_text(json.dumps(traces, indent=2))
    return paths
