"""Pure-Python and compiled kernels must agree move for move."""

import os
import subprocess
import sys

import numpy as np
import pytest

import gnls._kernels as kernels
from gnls._kernels import get_backend
from gnls._state import SolverState
from gnls.construction import clarke_wright
from gnls.instance import generate_instance
from gnls.localsearch import build_neighbor_lists


py = get_backend("python")
cy = pytest.importorskip("gnls._kernels._cy", reason="compiled backend not built")


def _states(seed, n=35):
    inst = generate_instance(seed, n, "random", (1, 8), 25)
    sol = clarke_wright(inst)
    nb = build_neighbor_lists(inst, 8).table
    return inst, SolverState.from_solution(sol), SolverState.from_solution(sol), nb


def _assert_same(s1: SolverState, s2: SolverState):
    assert s1.total == s2.total
    assert s1.n_slots == s2.n_slots
    assert np.array_equal(s1.succ, s2.succ)
    assert np.array_equal(s1.pred, s2.pred)
    assert np.array_equal(s1.route_of, s2.route_of)
    assert np.array_equal(s1.load, s2.load)
    assert np.array_equal(s1.rcost, s2.rcost)
    assert np.array_equal(s1.size, s2.size)


@pytest.mark.parametrize("seed", range(12))
def test_destroy_repair_ls_cycles_identical(seed):
    inst, s_py, s_cy, nb = _states(seed)
    rng = np.random.default_rng(seed)
    for _ in range(6):
        pool = np.flatnonzero(s_py.present_mask())
        chosen = rng.choice(pool, size=min(6, pool.size), replace=False)
        for c in chosen:
            s_py.remove_customer(int(c))
            s_cy.remove_customer(int(c))
        order = rng.permutation(chosen.astype(np.int64))
        assert py.greedy_insert(s_py, order) == cy.greedy_insert(s_cy, order)
        assert py.two_opt(s_py) == cy.two_opt(s_cy)
        assert py.relocate(s_py, nb) == cy.relocate(s_cy, nb)
        assert py.swap(s_py, nb) == cy.swap(s_cy, nb)
        _assert_same(s_py, s_cy)


@pytest.mark.parametrize("seed", range(6))
def test_regret2_identical(seed):
    inst, s_py, s_cy, nb = _states(seed, n=25)
    rng = np.random.default_rng(100 + seed)
    pool = np.flatnonzero(s_py.present_mask())
    chosen = np.sort(rng.choice(pool, size=8, replace=False))
    for c in chosen:
        s_py.remove_customer(int(c))
        s_cy.remove_customer(int(c))
    assert py.regret2_insert(s_py, chosen.astype(np.int64)) == \
           cy.regret2_insert(s_cy, chosen.astype(np.int64))
    _assert_same(s_py, s_cy)


def test_no_matrix_path_identical():
    # large-N code path computes distances from coordinates on the fly
    inst = generate_instance(0, 30, "random", (1, 8), 25)
    sol = clarke_wright(inst)
    nb = build_neighbor_lists(inst, 8).table
    s_py = SolverState.from_solution(sol)
    s_cy = SolverState.from_solution(sol)
    s_py.dmat = None
    s_cy.dmat = None
    assert py.two_opt(s_py) == cy.two_opt(s_cy)
    assert py.relocate(s_py, nb) == cy.relocate(s_cy, nb)
    assert py.swap(s_py, nb) == cy.swap(s_cy, nb)
    _assert_same(s_py, s_cy)


@pytest.mark.slow
def test_full_run_identical_across_backends(tmp_path):
    """End-to-end run_lns traces must match between backends (subprocess)."""
    script = r"""
import sys
import numpy as np
from gnls.instance import generate_instance
from gnls.construction import clarke_wright
from gnls.lns import run_lns, LnsConfig
import gnls._kernels as K

inst = generate_instance(5, 25, "random", (1, 8), 20)
start = clarke_wright(inst)
best, trace = run_lns(inst, start, LnsConfig(max_iterations=400, rng_seed=3))
trace.to_csv(sys.argv[1])
print(K.BACKEND, best.total_cost)
"""
    out_cy = tmp_path / "cy.csv"
    out_py = tmp_path / "py.csv"
    env = dict(os.environ)
    env.pop("GNLS_PURE_PYTHON", None)
    r1 = subprocess.run([sys.executable, "-c", script, str(out_cy)],
                        env=env, capture_output=True, text=True)
    assert r1.returncode == 0, r1.stderr
    assert r1.stdout.startswith("cython")
    env["GNLS_PURE_PYTHON"] = "1"
    r2 = subprocess.run([sys.executable, "-c", script, str(out_py)],
                        env=env, capture_output=True, text=True)
    assert r2.returncode == 0, r2.stderr
    assert r2.stdout.startswith("python")
    assert out_cy.read_bytes() == out_py.read_bytes()
    assert r1.stdout.split()[1] == r2.stdout.split()[1]
