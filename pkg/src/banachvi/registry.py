"""Named problems with their default schedules and starting points."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import SpaceSpec
from .problems import BifunctionSpec, MapSpec, OperatorSpec, ProblemSpec
from .schedules import AffineRule, LambdaRule, ScheduleSet
from .sets import Box


@dataclass(frozen=True, eq=False)
class RegisteredProblem:
    problem_id: str
    problem: ProblemSpec
    x0: np.ndarray
    alg1_alpha: tuple
    alg2_alpha: tuple
    r: Optional[float]
    notes: tuple = ()
    adversarial: bool = False
    baseline_step: float = 0.5
    thong: dict = field(default_factory=lambda: {"gamma": 1.0, "l": 0.5, "mu": 0.6})

    def schedule(self, algorithm, strict_paper=False):
        lam = LambdaRule.harmonic() if strict_paper else LambdaRule.capped_harmonic(0.99)
        if algorithm == "alg1":
            return ScheduleSet(lam, self.alg1_alpha, None)
        if algorithm == "alg2":
            return ScheduleSet(lam, self.alg2_alpha, self.r)
        raise KeyError(algorithm)


def _thirds():
    return (AffineRule(1 / 3), AffineRule(1 / 3), AffineRule(1 / 3))


def _example_4_1():
    problem = ProblemSpec(
        space=SpaceSpec.euclidean(1),
        feasible=Box([-5.0], [5.0]),
        operator=OperatorSpec.identity(alpha=1.0),
        bifunction=BifunctionSpec.scalar_quadratic(16.0, 9.0, -25.0),
        map=MapSpec.scaling(1.0 / 3.0),
        known_solution=np.zeros(1),
        name="example-4-1",
    )
    alg2 = (AffineRule(1 / 4, 1 / 4), AffineRule(1 / 4, -1 / 6),
            AffineRule(1 / 4, 1 / 12), AffineRule(1 / 4, -1 / 6))
    return RegisteredProblem(
        "example-4-1", problem, np.array([5.0]), _thirds(), alg2, r=1.0 / 42.0,
        notes=("r_n = 1/42 is inferred from u_n = x_n/2 in the worked recursion",
               "alg1 weights (1/3, 1/3, 1/3) are not from the source example"),
    )


def _lp15_box():
    problem = ProblemSpec(
        space=SpaceSpec.lp(2, 1.5),
        feasible=Box([-2.0, -1.0], [3.0, 4.0]),
        operator=OperatorSpec.identity(alpha=1.0),
        bifunction=BifunctionSpec.scalar_quadratic(2.0, 1.0, -3.0),
        map=MapSpec.scaling(1.0 / 3.0),
        known_solution=np.zeros(2),
        name="lp15-box",
    )
    alg2 = (AffineRule(1 / 4, 1 / 4), AffineRule(1 / 4, -1 / 6),
            AffineRule(1 / 4, 1 / 12), AffineRule(1 / 4, -1 / 6))
    return RegisteredProblem("lp15-box", problem, np.array([3.0, -1.0]), _thirds(), alg2,
                             r=1.0)


def _euclid2_affine():
    problem = ProblemSpec(
        space=SpaceSpec.euclidean(2),
        feasible=Box([-1.0, -2.0], [2.0, 1.0]),
        operator=OperatorSpec.affine([[2.0, 1.0], [1.0, 2.0]]),
        bifunction=BifunctionSpec.zero(),
        map=MapSpec.scaling(0.5),
        known_solution=np.zeros(2),
        name="euclid2-affine",
    )
    alg2 = (AffineRule(0.3), AffineRule(0.3), AffineRule(0.2), AffineRule(0.2))
    return RegisteredProblem("euclid2-affine", problem, np.array([2.0, -2.0]), _thirds(),
                             alg2, r=1.0, baseline_step=0.25,
                             thong={"gamma": 1.0, "l": 0.5, "mu": 0.6})


def _adversarial_ism():
    base = _example_4_1()
    problem = ProblemSpec(
        space=base.problem.space,
        feasible=base.problem.feasible,
        operator=OperatorSpec.identity(alpha=2.0),
        bifunction=base.problem.bifunction,
        map=base.problem.map,
        known_solution=base.problem.known_solution,
        name="adversarial-ism",
    )
    return RegisteredProblem(
        "adversarial-ism", problem, base.x0, base.alg1_alpha, base.alg2_alpha, base.r,
        notes=("alpha = 2 overstates the modulus of A = I; validation must fail",),
        adversarial=True,
    )


_BUILDERS = {
    "example-4-1": _example_4_1,
    "lp15-box": _lp15_box,
    "euclid2-affine": _euclid2_affine,
    "adversarial-ism": _adversarial_ism,
}
_CACHE = {}


class UnknownProblem(KeyError):
    def __str__(self):
        return f"unknown problem: {self.args[0]}"


def get(problem_id):
    if problem_id not in _BUILDERS:
        raise UnknownProblem(problem_id)
    if problem_id not in _CACHE:
        _CACHE[problem_id] = _BUILDERS[problem_id]()
    return _CACHE[problem_id]


def problem_ids(include_adversarial=True):
    return [k for k in _BUILDERS if include_adversarial or not get(k).adversarial]
