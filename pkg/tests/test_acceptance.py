"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``.  The large-instance and
statistical checks are marked slow; everything runs by default.
"""

import resource
import time

import numpy as np
import pytest
from scipy.special import expit

from gnls.bench import ExperimentPlan, VariantSpec, compare_variants, run_experiment
from gnls.construction import clarke_wright
from gnls.gnn import build_graph, decode_marks, forward, load_weights, random_model
from gnls.guidance import GuidanceConfig, GuidanceOracle, allowed
from gnls.instance import generate_instance
from gnls.lns import LnsConfig, run_lns
from gnls.solution import gap, validate
from gnls.stats import _normal_p, _ranks_with_ties, wilcoxon_one_tailed

import oracles


def _report(name: str, detail: str = ""):
    print(f"\nACCEPTANCE PASS - {name}" + (f" ({detail})" if detail else ""))


@pytest.mark.slow
def test_exact_optimum_recovery():
    """50/50 exact optima on N <= 8 within 60 s of total solver time."""
    rng = np.random.default_rng(2024)
    solved = 0
    total_runtime = 0.0
    for trial in range(50):
        n = int(rng.integers(3, 9))
        inst = generate_instance(int(rng.integers(0, 10**6)), n, "random",
                                 (1, 10), 15)
        opt = oracles.brute_force_optimum(inst)
        t0 = time.perf_counter()
        start = clarke_wright(inst)
        best, _ = run_lns(inst, start, LnsConfig(max_iterations=10_000,
                                                 rng_seed=trial))
        total_runtime += time.perf_counter() - t0
        assert validate(best) == []
        assert best.total_cost == opt, (
            f"trial {trial}: n={n} got {best.total_cost}, optimum {opt}")
        solved += 1
    assert solved == 50
    assert total_runtime < 60.0, f"solver runtime {total_runtime:.1f}s >= 60s"
    _report("exact-optimum recovery", f"50/50 in {total_runtime:.1f}s")


def test_gap_arithmetic():
    """Benchmark-table gap formula to three decimals."""
    assert round(gap(26383.8, 26362), 3) == 0.083
    assert round(gap(4464854, 4373244), 3) == 2.095
    _report("gap arithmetic", "0.083 / 2.095")


def test_baseline_reduction():
    """Null-selector guided runs are bit-identical to unguided, seeds 0-4."""
    fixtures = [generate_instance(s, 30 + 5 * s, "random", (1, 8), 30)
                for s in range(3)]
    for inst in fixtures:
        start = clarke_wright(inst)
        for seed in range(5):
            cfg = LnsConfig(max_iterations=600, rng_seed=seed)
            oracle = GuidanceOracle(GuidanceConfig(selector="null"), inst)
            b1, t1 = run_lns(inst, start, cfg, guidance=oracle)
            b2, t2 = run_lns(inst, start, cfg, guidance=None)
            assert t1.current == t2.current
            assert t1.best == t2.best
            assert t1.accepted == t2.accepted
            assert t1.removed == t2.removed
            assert t1.temperature == t2.temperature
            assert b1.total_cost == b2.total_cost
            assert [r.seq for r in b1.routes] == [r.seq for r in b2.routes]
    _report("baseline reduction", "3 instances x seeds 0-4 bit-identical")


@pytest.mark.slow
def test_prohibition_soundness():
    """p=1: marked nodes never removed over a full 1e5-iteration run;
    p=0.65: empirical admit rate 0.35 +- 0.01 over 1e5 draws."""
    inst = generate_instance(7, 100, "central", (1, 10), 100)
    start = clarke_wright(inst)
    cfg = GuidanceConfig(selector="heuristic", quantile=0.5, p_theta=1.0)
    oracle = GuidanceOracle(cfg, inst)
    best, trace = run_lns(inst, start,
                          LnsConfig(max_iterations=100_000, rng_seed=0,
                                    audit_removed=True),
                          guidance=oracle)
    marked = oracle.marks.marked
    assert len(marked) > 0
    assert len(trace.removed_sets) == 100_000
    for removed in trace.removed_sets:
        assert not (set(removed) & marked)

    from gnls.gnn import MarkSet
    marks = MarkSet(frozenset({1}), None, "heuristic")
    rng = np.random.default_rng(123)
    n_draws = 100_000
    admitted = sum(allowed(marks, 0.65, 1, rng) for _ in range(n_draws))
    rate = admitted / n_draws
    assert abs(rate - 0.35) <= 0.01, f"admit rate {rate:.4f}"
    _report("prohibition soundness",
            f"0 violations in 1e5 iterations; admit rate {rate:.4f}")


def test_threshold_monotonicity():
    """marks(t') subset of marks(t) for t' >= t over 1000 random prob vectors."""
    inst = generate_instance(9, 40, "random", (1, 10), 40)
    g = build_graph(inst, clarke_wright(inst), k=8)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        probs = rng.random(g.n_edges)
        t1, t2 = sorted(rng.random(2))
        m_low = decode_marks(probs, g, t1).marked
        m_high = decode_marks(probs, g, t2).marked
        assert m_high <= m_low
    _report("threshold monotonicity", "1000 trials")


def test_forward_oracle_equivalence():
    """Vectorized forward vs scalar reference to 1e-6 relative on 20 fixtures;
    eta normalization identity to 1e-7."""
    rng = np.random.default_rng(77)
    for trial in range(20):
        n = int(rng.integers(5, 11))
        hidden = int(rng.choice([4, 8]))
        layers = int(rng.integers(1, 3))
        inst = generate_instance(int(rng.integers(0, 10**6)), n, "random",
                                 (1, 5), 12)
        g = build_graph(inst, clarke_wright(inst), k=4)
        model = random_model(np.random.default_rng(trial), n_layers=layers,
                             hidden=hidden, n_mlp_layers=2)
        capture = []
        fast = forward(model, g, capture=capture)
        slow = np.array(oracles.naive_forward(model, g))
        rel = np.abs(fast - slow) / np.maximum(np.abs(slow), 1e-9)
        assert rel.max() < 1e-6, f"trial {trial}: rel err {rel.max():.2e}"

        src = g.edge_src.astype(np.int64)
        for layer in capture:
            sig = expit(layer["edge_in"])
            sig_sum = np.zeros((g.n_nodes, hidden))
            np.add.at(sig_sum, src, sig)
            eta_sum = np.zeros((g.n_nodes, hidden))
            np.add.at(eta_sum, src, layer["eta"])
            identity = sig_sum / (sig_sum + model.eta_eps)
            assert np.abs(eta_sum - identity).max() < 1e-7
    _report("forward oracle equivalence", "20 fixtures, eta identity held")


@pytest.mark.slow
def test_very_large_truncation(fixture_weights):
    """N=30000: graph has exactly 1001 nodes in < 5 s; a guided 1e4-iteration
    solve stays under 4 GB peak memory."""
    inst = generate_instance(0, 30_000, "random", (1, 10), 200)
    start = clarke_wright(inst)
    t0 = time.perf_counter()
    g = build_graph(inst, start, k=25)
    build_s = time.perf_counter() - t0
    assert g.n_nodes == 1001
    assert build_s < 5.0, f"build_graph took {build_s:.2f}s"

    cfg = GuidanceConfig(selector="gnn", weights_path=str(fixture_weights),
                         threshold=0.5, p_theta=0.65)
    oracle = GuidanceOracle(cfg, inst)
    best, trace = run_lns(inst, start, LnsConfig(max_iterations=10_000, rng_seed=0),
                          guidance=oracle)
    assert best.total_cost <= start.total_cost
    assert len(trace.iteration) == 10_000
    peak_gb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1e6
    assert peak_gb < 4.0, f"peak RSS {peak_gb:.2f} GB"
    assert validate(best) == []
    _report("very-large truncation",
            f"1001 nodes in {build_s:.2f}s; peak {peak_gb:.2f} GB; "
            f"cost {start.total_cost} -> {best.total_cost}")


def test_wilcoxon_correctness():
    """Exact p = 1/32 for n=5 unanimous wins; exact vs normal within 0.01 at n=20."""
    pairs = [(10.0, 9.5), (11.0, 10.2), (12.0, 11.1), (13.0, 12.3), (14.0, 13.6)]
    res = wilcoxon_one_tailed(pairs)
    assert res.method == "exact"
    assert res.p_value == pytest.approx(0.03125)

    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(50):
        base = rng.normal(100, 10, 20)
        var = base + rng.normal(-1, 3, 20)
        pairs = list(zip(base, var))
        exact = wilcoxon_one_tailed(pairs)
        diffs = np.array([v - b for b, v in pairs])
        diffs = diffs[diffs != 0]
        ranks = _ranks_with_ties(np.abs(diffs))
        w_plus = float(ranks[diffs > 0].sum())
        approx = _normal_p(np.abs(diffs), ranks, w_plus)
        worst = max(worst, abs(exact.p_value - approx))
    assert worst <= 0.01, f"max |exact - normal| = {worst:.4f}"
    _report("wilcoxon correctness", f"p=1/32; max exact-normal gap {worst:.4f}")


@pytest.mark.slow
def test_direction_of_effect_smoke():
    """Guided (heuristic selector, preset aspiration) vs baseline on 20
    instances x 5 seeds: median relative cost change <= +0.5% and a valid
    one-tailed p-value, in under 30 minutes."""
    t0 = time.perf_counter()
    instances = [generate_instance(seed, 100, "random", (1, 10), 100)
                 for seed in range(20)]
    guided_cfg = GuidanceConfig.from_preset("filo-x-small", selector="heuristic",
                                            quantile=0.5)
    plan = ExperimentPlan(
        instances=instances,
        variants=[VariantSpec("baseline"),
                  VariantSpec("guided", guidance=guided_cfg)],
        runs=5, iterations=5000, workers=4)
    table = run_experiment(plan)
    assert all(rec.error is None for rec in table.records)

    base = table.mean_metric_by_instance("baseline")
    guided = table.mean_metric_by_instance("guided")
    rel_change = [(guided[k] - base[k]) / base[k] for k in base]
    median_change = float(np.median(rel_change))
    assert median_change <= 0.005, f"median relative change {median_change:.4%}"

    pairs, _ = compare_variants(table, "baseline", "guided")
    res = wilcoxon_one_tailed(pairs)
    assert res.p_value is not None
    assert 0.0 <= res.p_value <= 1.0
    wall = time.perf_counter() - t0
    assert wall < 1800, f"smoke test took {wall:.0f}s"
    _report("direction-of-effect smoke",
            f"median change {median_change:+.3%}, p={res.p_value:.4f}, "
            f"{wall:.0f}s")
