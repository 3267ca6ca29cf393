import logging

import numpy as np
import pytest

from banachvi import registry
from banachvi.algorithms import (StopRule, natural_residual, run_algorithm1, run_algorithm2,
                                 run_korpelevich, run_thong, run_tseng, thong_step_size)
from banachvi.exceptions import ProblemError, ScheduleError
from banachvi.geometry import SpaceSpec
from banachvi.problems import MapSpec, OperatorSpec, ProblemSpec
from banachvi.schedules import AffineRule, LambdaRule, ScheduleSet, affine_rules
from banachvi.sets import Box

import baselines
from oracles import example41_faithful, first_below

EX = registry.get("example-4-1")
LONG = StopRule(1e-300, 1e-300, 200)


def thirds(lam=LambdaRule.harmonic()):
    return ScheduleSet(lam, affine_rules([[1 / 3]] * 3))


def test_alg1_first_step():
    p = baselines.interval()
    t = run_algorithm1(p, thirds(), np.array([3.0]), StopRule(max_iter=1))
    row = t.rows[0]
    assert row.y[0] == 0.0 and row.z[0] == 0.0
    assert t.final[0] == pytest.approx(4 / 3, abs=1e-15)


def test_alg1_fixed_at_solution():
    t = run_algorithm1(baselines.interval(), thirds(), np.zeros(1), StopRule(max_iter=5))
    assert t.status == "converged" and t.iterations == 1
    assert np.all(t.xs() == 0.0)


def test_alg1_needs_map():
    p = ProblemSpec(SpaceSpec.euclidean(1), Box([-1.0], [1.0]), OperatorSpec.identity())
    with pytest.raises(ProblemError, match="no map"):
        run_algorithm1(p, thirds(), np.zeros(1))
    t = run_algorithm1(p, thirds(), np.array([0.5]), StopRule(max_iter=3), allow_identity_map=True)
    assert t.iterations == 3


def test_alg1_example_converges():
    t = run_algorithm1(EX.problem, EX.schedule("alg1", strict_paper=True), EX.x0)
    assert t.status == "converged"
    assert abs(t.final[0]) <= 1e-6


def test_alg2_first_step():
    t = run_algorithm2(EX.problem, EX.schedule("alg2", strict_paper=True), EX.x0,
                       StopRule(max_iter=1))
    row = t.rows[0]
    assert row.y[0] == 0.0 and row.w[0] == 0.0 and row.z[0] == 0.0
    assert row.u[0] == pytest.approx(2.5)
    assert t.final[0] == pytest.approx(5 / 2 + 5 / 36, abs=1e-14)


def test_alg2_matches_faithful_scalar_oracle():
    t = run_algorithm2(EX.problem, EX.schedule("alg2", strict_paper=True), EX.x0, LONG)
    xs = t.xs()[:, 0]
    oracle = example41_faithful(5.0, 200)
    np.testing.assert_allclose(xs, oracle, atol=1e-12, rtol=0)
    assert first_below(xs) == first_below(oracle) == 35
    assert abs(xs[59]) <= 1e-6


def test_alg2_zero_start():
    t = run_algorithm2(EX.problem, EX.schedule("alg2"), np.zeros(1))
    assert t.status == "converged" and t.iterations == 1
    assert t.rows[0].step_norm == 0.0


def test_strict_mode_warns(caplog):
    with caplog.at_level(logging.WARNING):
        run_algorithm2(EX.problem, EX.schedule("alg2", strict_paper=True), EX.x0,
                       StopRule(max_iter=1))
    assert "step cap" in caplog.text


def test_start_outside():
    with pytest.raises(ProblemError, match="outside"):
        run_algorithm2(EX.problem, EX.schedule("alg2"), np.array([7.0]))


def test_invalid_schedule():
    bad = ScheduleSet(LambdaRule.harmonic(), affine_rules([[0.5], [0.5], [0.5]]))
    with pytest.raises(ScheduleError, match="sum to 1"):
        run_algorithm1(EX.problem, bad, EX.x0)
    zero = ScheduleSet(LambdaRule.harmonic(), affine_rules([[1.0], [0.0], [0.0]]))
    with pytest.raises(ScheduleError, match="liminf"):
        run_algorithm1(EX.problem, zero, EX.x0)
    no_r = ScheduleSet(LambdaRule.harmonic(), EX.alg2_alpha, None)
    with pytest.raises(ScheduleError):
        run_algorithm2(EX.problem, no_r, EX.x0)
    with pytest.raises(ScheduleError):
        LambdaRule.capped_harmonic(1.5)


@pytest.mark.parametrize("pid", registry.problem_ids(include_adversarial=False))
@pytest.mark.parametrize("alg", ["alg1", "alg2"])
def test_fejer_chain_and_cut(pid, alg):
    e = registry.get(pid)
    run = run_algorithm1 if alg == "alg1" else run_algorithm2
    t = run(e.problem, e.schedule(alg), e.x0, StopRule(1e-300, 1e-300, 60))
    phis = [r.phi_to_solution for r in t.rows] + [t.final_phi]
    assert np.all(np.diff(phis) <= 1e-10)
    for r in t.rows:
        assert r.phi_z <= r.phi_y + 1e-10 <= r.phi_to_solution + 2e-10
        if alg == "alg2":
            assert r.solution_in_cut


def test_korpelevich_and_tseng_examples():
    p = baselines.interval()
    one = StopRule(max_iter=1)
    for run in (run_korpelevich, run_tseng):
        t = run(p, 0.5, np.array([4.0]), one)
        assert t.rows[0].y[0] == pytest.approx(2.0)
        assert t.final[0] == pytest.approx(3.0)
    a = run_korpelevich(p, 0.5, np.array([4.0]), StopRule(max_iter=30))
    b = run_tseng(p, 0.5, np.array([4.0]), StopRule(max_iter=30))
    np.testing.assert_allclose(a.xs(), b.xs(), atol=1e-15)
    np.testing.assert_allclose(a.xs()[:, 0], 4.0 * 0.75 ** np.arange(31), rtol=1e-12)


def test_baselines_constant_at_solution():
    for make, _, lam in baselines.CASES:
        p = make()
        x0 = np.zeros(p.space.dim)
        for t in (run_korpelevich(p, lam, x0), run_tseng(p, lam, x0),
                  run_thong(p, x0=x0, **baselines.THONG)):
            assert np.all(t.xs() == 0.0)


def test_baselines_require_euclidean():
    p = registry.get("lp15-box").problem
    for run in (run_korpelevich, run_tseng):
        with pytest.raises(ProblemError, match="requires euclidean"):
            run(p, 0.1, np.zeros(2))
    with pytest.raises(ProblemError, match="requires euclidean"):
        run_thong(p, 1.0, 0.5, 0.6, np.zeros(2))


def test_rotation_converges():
    p = baselines.rotation()
    t = run_korpelevich(p, 0.5, np.array([3.0, 2.0]), StopRule(1e-12, 1e-12, 2000))
    assert natural_residual(p, t.final) <= 1e-8


def test_thong_identity_step():
    t = run_thong(baselines.interval(), 1.0, 0.5, 0.6, np.array([3.0]), StopRule(max_iter=20))
    assert all(r.lam == 0.5 and r.backtracks == 1 for r in t.rows)
    xs = np.abs(t.xs()[:, 0])
    assert np.all(np.diff(xs) < 0)


def test_thong_linesearch_contract():
    for make, x0, _ in baselines.CASES:
        p = make()
        t = run_thong(p, x0=x0, stop=StopRule(1e-10, 1e-10, 500), **baselines.THONG)
        for r in t.rows:
            assert baselines.linesearch_ok(p, r.x, r.lam, **baselines.THONG)


def test_thong_backtrack_cap():
    p = baselines.interval()
    with pytest.raises(ScheduleError, match="backtracks"):
        # a huge operator with tiny l cannot satisfy the rule before the cap
        big = ProblemSpec(p.space, p.feasible, OperatorSpec.custom(lambda x: 1e300 * x ** 3, 1.0),
                          map=p.map)
        thong_step_size(big, np.array([4.0]), 1.0, 0.999, 1e-3)


def test_hilbert_reduction():
    for make, x0, lam in baselines.CASES:
        p = make()
        s = ScheduleSet(LambdaRule.constant(lam), affine_rules([[1 / 3]] * 3))
        a = run_algorithm1(p, s, x0, StopRule(max_iter=1))
        k = run_korpelevich(p, lam, x0, StopRule(max_iter=1))
        np.testing.assert_allclose(a.rows[0].y, k.rows[0].y, atol=1e-12, rtol=0)


def test_deterministic():
    e = registry.get("lp15-box")
    a = run_algorithm2(e.problem, e.schedule("alg2"), e.x0, StopRule(max_iter=20))
    b = run_algorithm2(e.problem, e.schedule("alg2"), e.x0, StopRule(max_iter=20))
    assert np.array_equal(a.xs(), b.xs())


def test_thong_default_alpha():
    assert AffineRule(0.0, 1.0, 1.0)(1) == 0.5
