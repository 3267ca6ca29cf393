"""Acceptance criteria, one test per criterion.

Every test prints a single ``PASS``/``FAIL`` line with its measured numbers.
Run on its own with ``pytest tests/test_acceptance.py -v -s`` or
``python tests/test_acceptance.py``.
"""

import contextlib
import sys
import time

import numpy as np
import pytest

from banachvi import registry
from banachvi.algorithms import (StopRule, natural_residual, run_algorithm1, run_algorithm2,
                                 run_korpelevich, run_thong, run_tseng)
from banachvi.cli import main as cli_main
from banachvi.geometry import SpaceSpec, duality_map, lyapunov_phi
from banachvi.resolvent import resolvent, resolvent_oracle_1d

import baselines
import identities
import setcases
from oracles import example41_displayed, example41_faithful, first_below

pytestmark = pytest.mark.acceptance

LINES = []


def report(label, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
    LINES.append(line)
    print(line, flush=True)
    return ok


@contextlib.contextmanager
def timer():
    box = {}
    t0 = time.perf_counter()
    yield box
    box["s"] = time.perf_counter() - t0


def _example_run(steps):
    e = registry.get("example-4-1")
    sched = e.schedule("alg2", strict_paper=True)
    return run_algorithm2(e.problem, sched, e.x0, StopRule(1e-300, 1e-300, steps))


# 1. example-4-1 ------------------------------------------------------------

def test_c1a_example41_matches_displayed_recursion():
    t = _example_run(100)
    xs = t.xs()[:, 0]
    oracle = example41_displayed(5.0, 100)
    gap = np.abs(xs - oracle)
    bad = np.nonzero(gap > 1e-12)[0]
    first = f"first mismatch at x_{bad[0] + 1}" if bad.size else "no mismatch"
    ok = report("criterion 1a (per-step match with the displayed recursion, 1e-12, 100 steps)",
                not bad.size, f"max gap {gap.max():.3e}, {first}")
    assert ok


def test_c1b_example41_reaches_tolerance():
    t = _example_run(100)
    xs = t.xs()[:, 0]
    n_displayed = first_below(example41_displayed(5.0, 100))
    n_faithful = first_below(example41_faithful(5.0, 100))
    n_run = first_below(xs)
    ok = abs(xs[n_displayed - 1]) <= 1e-6 and n_run == n_faithful
    report("criterion 1b (|x_n| <= 1e-6 by the oracle iteration count)", ok,
           f"|x_{n_displayed}| = {abs(xs[n_displayed - 1]):.3e}; first hit x_{n_run} "
           f"(displayed oracle x_{n_displayed}, cut-aware oracle x_{n_faithful})")
    assert ok


def test_c1c_example41_runtime():
    with timer() as tm:
        _example_run(100)
    ok = report("criterion 1c (100 steps in < 1 s)", tm["s"] < 1.0, f"{tm['s']:.3f} s")
    assert ok


# 2. resolvent closed form ---------------------------------------------------

def test_c2_resolvent_closed_form():
    p = registry.get("example-4-1").problem
    rng = np.random.default_rng(2)
    worst_solver = worst_oracle = 0.0
    with timer() as tm:
        for _ in range(100):
            r = rng.uniform(0.01, 10.0)
            x = np.array([rng.uniform(-5.0, 5.0)])
            exact = x[0] / (42 * r + 1)
            u = resolvent(p, r, x)[0]
            v = resolvent_oracle_1d(p, r, x, grid=10_001)[0]
            worst_solver = max(worst_solver, abs(u - exact), abs(u - v))
            worst_oracle = max(worst_oracle, abs(v - exact))
    ok = max(worst_solver, worst_oracle) <= 1e-4 and tm["s"] < 10.0
    report("criterion 2 (resolvent vs oracle vs x/(42r+1), 1e-4, 100 cases, < 10 s)", ok,
           f"solver err {worst_solver:.2e}, oracle err {worst_oracle:.2e}, {tm['s']:.2f} s")
    assert ok


# 3. geometry identities -----------------------------------------------------

def test_c3_geometry_identities():
    rng = np.random.default_rng(3)
    worst = {}
    with timer() as tm:
        for s in identities.SPACE_FAMILIES:
            for k, v in identities.worst_violations(s, rng, 1000).items():
                worst[k] = max(worst.get(k, -np.inf), v)
    ok = all(v <= 1e-9 for v in worst.values()) and tm["s"] < 30.0
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report("criterion 3 (geometry identities, 1000 cases per space, 1e-9, < 30 s)", ok,
           f"{detail}; {tm['s']:.1f} s")
    assert ok


# 4. projection suite --------------------------------------------------------

def test_c4_projection_suite():
    rng = np.random.default_rng(4)
    families = {"euclidean": [SpaceSpec.euclidean(d) for d in range(1, 6)],
                "lp(1.5)": [SpaceSpec.lp(d, 1.5) for d in range(1, 4)]}
    worst_char = worst_tp = -np.inf
    with timer() as tm:
        for spaces in families.values():
            for i in range(200):
                space = spaces[i % len(spaces)]
                kind = setcases.KINDS[i % len(setcases.KINDS)]
                c, t = setcases.projection_case(space, kind, rng, n_samples=1000)
                worst_char, worst_tp = max(worst_char, c), max(worst_tp, t)
    ok = worst_char <= 1e-8 and worst_tp <= 1e-8 and tm["s"] < 60.0
    report("criterion 4 (projection characterization and three-point, 200 per family, < 60 s)",
           ok, f"char {worst_char:.2e}, three-point {worst_tp:.2e}, {tm['s']:.1f} s")
    assert ok


# 5 and 6. Fejer monotonicity, comparison chain, cut soundness --------------

def _solution_problems():
    return [pid for pid in registry.problem_ids() if registry.get(pid).problem.known_solution is not None]


def test_c5_fejer_monotonicity():
    violations, checked = 0, 0
    worst = -np.inf
    for pid in _solution_problems():
        e = registry.get(pid)
        for alg, run in (("alg1", run_algorithm1), ("alg2", run_algorithm2)):
            for strict in (False, True):
                t = run(e.problem, e.schedule(alg, strict), e.x0, StopRule(1e-300, 1e-300, 200))
                phis = np.array([r.phi_to_solution for r in t.rows] + [t.final_phi])
                d = np.diff(phis)
                chain = [max(r.phi_z - r.phi_y, r.phi_y - r.phi_to_solution) for r in t.rows]
                worst = max(worst, d.max(), max(chain))
                violations += int(np.sum(d > 1e-10)) + sum(c > 1e-10 for c in chain)
                checked += len(t.rows)
    ok = violations == 0
    report("criterion 5 (Fejer monotonicity and phi chain, 200 steps, all problems)", ok,
           f"{violations} violations over {checked} iterations, worst increase {worst:.2e}")
    assert ok


def test_c6_cut_soundness():
    misses, checked = 0, 0
    for pid in _solution_problems():
        e = registry.get(pid)
        for strict in (False, True):
            t = run_algorithm2(e.problem, e.schedule("alg2", strict), e.x0,
                               StopRule(1e-300, 1e-300, 200))
            misses += sum(not r.solution_in_cut for r in t.rows)
            checked += len(t.rows)
    ok = misses == 0
    report("criterion 6 (solution inside every cut set, 1e-10)", ok,
           f"{misses} misses over {checked} iterations")
    assert ok


# 7. resolvent properties ---------------------------------------------------

def test_c7_resolvent_properties():
    p = registry.get("example-4-1").problem
    s = p.space
    rng = np.random.default_rng(7)
    worst_fne = worst_l5 = -np.inf
    q = np.zeros(1)
    for _ in range(500):
        r = rng.uniform(0.01, 10.0)
        x, y = rng.uniform(-5.0, 5.0, (2, 1))
        kx, ky = resolvent(p, r, x), resolvent(p, r, y)
        d = kx - ky
        fne = d @ (duality_map(s, kx) - duality_map(s, ky)) - d @ (duality_map(s, x) - duality_map(s, y))
        l5 = lyapunov_phi(s, q, kx) + lyapunov_phi(s, kx, x) - lyapunov_phi(s, q, x)
        worst_fne, worst_l5 = max(worst_fne, fne), max(worst_l5, l5)
    ok = worst_fne <= 1e-8 and worst_l5 <= 1e-8
    report("criterion 7 (firm nonexpansiveness and phi(p,Kx)+phi(Kx,x) <= phi(p,x), 500 pairs)", ok,
           f"worst margins {worst_fne:.2e}, {worst_l5:.2e}")
    assert ok


# 8. baselines ---------------------------------------------------------------

def test_c8_baselines():
    worst_res, bad_steps, steps = 0.0, 0, 0
    stop = StopRule(1e-12, 1e-12, 5000)
    with timer() as tm:
        for make, x0, lam in baselines.CASES:
            p = make()
            for t in (run_korpelevich(p, lam, x0, stop), run_tseng(p, lam, x0, stop),
                      run_thong(p, x0=x0, stop=stop, **baselines.THONG)):
                worst_res = max(worst_res, natural_residual(p, t.final))
                if t.algorithm == "thong":
                    for r in t.rows:
                        steps += 1
                        bad_steps += not baselines.linesearch_ok(p, r.x, r.lam, **baselines.THONG)
    ok = worst_res <= 1e-8 and bad_steps == 0 and tm["s"] < 5.0
    report("criterion 8 (baselines reach residual 1e-8; linesearch contract, < 5 s)", ok,
           f"worst residual {worst_res:.2e}, {bad_steps}/{steps} bad steps, {tm['s']:.2f} s")
    assert ok


# 9. determinism -------------------------------------------------------------

def test_c9_determinism(tmp_path):
    configs = [("example-4-1", "alg2"), ("lp15-box", "alg2"), ("euclid2-affine", "thong")]
    same = True
    for pid, alg in configs:
        blobs = []
        for k in range(2):
            out = tmp_path / f"{pid}-{alg}-{k}.csv"
            with contextlib.redirect_stdout(None):
                cli_main(["run", "--problem", pid, "--algorithm", alg, "--max-iter", "100",
                          "--seed", "9", "--out", str(out)])
            blobs.append(out.read_bytes())
        same &= blobs[0] == blobs[1]
    ok = report("criterion 9 (repeated runs give byte-identical CSV)", same,
                f"{len(configs)} configurations compared")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
