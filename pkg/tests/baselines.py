"""Small Euclidean problems with known solution 0 for the Hilbert baselines."""

import numpy as np

from banachvi.geometry import SpaceSpec
from banachvi.problems import MapSpec, OperatorSpec, ProblemSpec
from banachvi.sets import Box, project


def interval():
    return ProblemSpec(SpaceSpec.euclidean(1), Box([-5.0], [5.0]), OperatorSpec.identity(),
                       map=MapSpec.scaling(1 / 3), known_solution=np.zeros(1), name="interval")


def rotation():
    # <Mx, x> = |x|^2 and |Mx|^2 = 2|x|^2, so M is 1/2-ism
    m = np.array([[1.0, 1.0], [-1.0, 1.0]])
    return ProblemSpec(SpaceSpec.euclidean(2), Box([-2.0, -1.0], [3.0, 2.0]),
                       OperatorSpec.affine(m, alpha=0.5), map=MapSpec.scaling(0.5),
                       known_solution=np.zeros(2), name="rotation")


def symmetric():
    return ProblemSpec(SpaceSpec.euclidean(2), Box([-1.0, -2.0], [2.0, 1.0]),
                       OperatorSpec.affine([[2.0, 1.0], [1.0, 2.0]]), map=MapSpec.scaling(0.5),
                       known_solution=np.zeros(2), name="symmetric")


CASES = [(interval, np.array([4.0]), 0.5), (rotation, np.array([3.0, 2.0]), 0.5),
         (symmetric, np.array([2.0, -2.0]), 0.25)]
THONG = dict(gamma=1.0, l=0.5, mu=0.6)


def linesearch_ok(p, x, lam, gamma, l, mu):
    """Accepted step satisfies the rule and the next larger grid step does not."""
    A, C = p.operator, p.feasible

    def holds(t):
        y = project(p.space, C, x - t * A(x))
        return t * np.linalg.norm(A(x) - A(y)) <= mu * np.linalg.norm(x - y)

    return holds(lam) and (lam == gamma or not holds(lam / l))
