"""Problem data: operators, bifunctions, maps, and assumption checks.

The convergence theorems quantify their hypotheses over the whole feasible
set. The ``verify_*`` functions check them on seeded random samples plus
the extreme points of the set, and report the worst margin seen.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exceptions import DimensionError, ProblemError
from .geometry import SpaceSpec, dual_norm, lyapunov_phi
from .sets import Box, contains, project, sample_points, support

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Operator ``A: C -> E*`` with its claimed inverse-strong-monotonicity modulus."""

    kind: str
    alpha: float
    matrix: Optional[np.ndarray] = None
    shift: Optional[np.ndarray] = None
    func: Optional[Callable] = None
    lipschitz: Optional[float] = None

    @classmethod
    def identity(cls, alpha=1.0):
        return cls("identity", alpha, lipschitz=1.0)

    @classmethod
    def affine(cls, matrix, shift=None, alpha=None):
        """``A x = M x + b``. ``alpha`` defaults to ``1/lambda_max(M)`` for symmetric PSD ``M``."""
        m = np.atleast_2d(np.asarray(matrix, dtype=float))
        b = np.zeros(m.shape[0]) if shift is None else np.asarray(shift, dtype=float)
        if alpha is None:
            if not np.allclose(m, m.T):
                raise ProblemError("alpha must be given for a nonsymmetric matrix")
            eig = np.linalg.eigvalsh(m)
            top = float(eig[-1])
            if eig[0] < -1e-12 * max(1.0, abs(top)):
                raise ProblemError("matrix is not positive semidefinite")
            # the zero operator is alpha-ism for every alpha
            alpha = np.inf if top == 0.0 else 1.0 / top
        return cls("affine", float(alpha), matrix=m, shift=b,
                   lipschitz=float(np.linalg.norm(m, 2)))

    @classmethod
    def custom(cls, func, alpha, lipschitz=None):
        return cls("custom", float(alpha), func=func, lipschitz=lipschitz)

    def __call__(self, x):
        if self.kind == "identity":
            return np.array(x, dtype=float)
        if self.kind == "affine":
            return self.matrix @ x + self.shift
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def scalar_form(self):
        """``(m, shift)`` when ``A x = m x + shift``, else None."""
        if self.kind == "identity":
            return 1.0, None
        if self.kind == "affine":
            m = self.matrix[0, 0]
            if np.array_equal(self.matrix, m * np.eye(self.matrix.shape[0])):
                return float(m), self.shift
        return None

    def to_dict(self):
        d = {"kind": self.kind, "alpha": self.alpha}
        if self.kind == "affine":
            d.update(matrix=self.matrix.tolist(), shift=self.shift.tolist())
        return d


@dataclass(frozen=True, eq=False)
class BifunctionSpec:
    """Bifunction ``F(u, y)`` for the equilibrium part of the problem.

    ``scalar_quadratic(a, b, c)`` is ``a*y^2 + b*u*y + c*u^2``; in more than
    one dimension the products are taken coordinatewise and summed, i.e.
    ``a||y||_2^2 + b<u, y> + c||u||_2^2``.
    """

    kind: str
    coeffs: tuple = ()
    func: Optional[Callable] = None
    grad_y: Optional[Callable] = None

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def scalar_quadratic(cls, a, b, c):
        return cls("scalar_quadratic", (float(a), float(b), float(c)))

    @classmethod
    def custom(cls, func, grad_y=None):
        return cls("custom", func=func, grad_y=grad_y)

    def __call__(self, u, y):
        u = np.asarray(u, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "zero":
            return 0.0
        if self.kind == "scalar_quadratic":
            a, b, c = self.coeffs
            return float(a * np.dot(y, y) + b * np.dot(u, y) + c * np.dot(u, u))
        return float(self.func(u, y))

    def diagonal_gradient(self, u):
        """Gradient of ``y -> F(u, y)`` evaluated at ``y = u``."""
        u = np.asarray(u, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(u)
        if self.kind == "scalar_quadratic":
            a, b, _ = self.coeffs
            return (2.0 * a + b) * u
        if self.grad_y is not None:
            return np.asarray(self.grad_y(u, u), dtype=float)
        # central differences
        h = 1e-6 * (1.0 + np.abs(u))
        g = np.empty_like(u)
        for i in range(u.shape[0]):
            e = np.zeros_like(u)
            e[i] = h[i]
            g[i] = (self(u, u + e) - self(u, u - e)) / (2.0 * h[i])
        return g

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "scalar_quadratic":
            d["coeffs"] = list(self.coeffs)
        return d


@dataclass(frozen=True, eq=False)
class MapSpec:
    """Self-map ``f`` of C assumed relatively nonexpansive."""

    kind: str
    k: float = 1.0
    func: Optional[Callable] = None
    fixed_points: tuple = ()

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def scaling(cls, k):
        if abs(k) > 1.0:
            raise ProblemError(f"scaling map needs |k| <= 1, got {k}")
        return cls("scaling", k=float(k))

    @classmethod
    def custom(cls, func, fixed_points=()):
        return cls("custom", func=func,
                   fixed_points=tuple(np.asarray(p, dtype=float) for p in fixed_points))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "identity":
            return x.copy()
        if self.kind == "scaling":
            return self.k * x
        return np.asarray(self.func(x), dtype=float)

    def known_fixed_points(self, dim):
        if self.kind == "scaling" and self.k != 1.0:
            return (np.zeros(dim),)
        return self.fixed_points

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "scaling":
            d["k"] = self.k
        return d


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    space: SpaceSpec
    feasible: object
    operator: OperatorSpec
    bifunction: Optional[BifunctionSpec] = None
    map: Optional[MapSpec] = None
    known_solution: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        if self.feasible.dim != self.space.dim:
            raise DimensionError("feasible set and space have different dimensions")
        if self.known_solution is not None:
            q = np.atleast_1d(np.asarray(self.known_solution, dtype=float))
            if q.shape != (self.space.dim,):
                raise DimensionError("known solution has the wrong length")
            object.__setattr__(self, "known_solution", q)

    @property
    def step_cap(self):
        """Upper bound ``c^2 alpha / 2`` on the step sizes lambda_n."""
        return self.space.c ** 2 * self.operator.alpha / 2.0


def apply_operator(p, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (p.space.dim,):
        raise DimensionError(f"expected a vector of length {p.space.dim}, got shape {x.shape}")
    if not contains(p.feasible, x, 1e-9):
        log.warning("operator evaluated outside the feasible set at %s", x)
    return p.operator(x)


@dataclass
class CheckReport:
    name: str
    passed: bool
    worst_margin: float
    worst_point: Optional[object] = None
    details: dict = field(default_factory=dict)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: worst margin {self.worst_margin:.6g}"


def _feasible_samples(s, n, rng):
    pts = sample_points(s, n, rng)
    if isinstance(s, Box) and s.dim <= 10:
        pts = np.vstack([s.vertices(), pts])
    return pts


def verify_ism(p, n_samples=10_000, tol=1e-8, rng=None):
    """Worst ``<x - y, Ax - Ay> - alpha ||Ax - Ay||_*^2`` over sampled pairs in C."""
    rng = np.random.default_rng(0) if rng is None else rng
    xs = _feasible_samples(p.feasible, n_samples, rng)
    ys = xs[rng.permutation(xs.shape[0])]
    worst, where = np.inf, None
    for x, y in zip(xs, ys):
        d = p.operator(x) - p.operator(y)
        margin = float(np.dot(x - y, d)) - p.operator.alpha * dual_norm(p.space, d) ** 2
        if margin < worst:
            worst, where = margin, (x, y)
    return CheckReport("inverse strong monotonicity", worst >= -tol, worst, where,
                       {"alpha": p.operator.alpha})


def verify_norm_condition(p, u, n_samples=10_000, tol=1e-8, rng=None):
    """Worst ``||Ax||_* - ||Ax - Au||_*`` over sampled x in C (should be <= 0)."""
    rng = np.random.default_rng(0) if rng is None else rng
    u = np.asarray(u, dtype=float)
    au = p.operator(u)
    worst, where = -np.inf, None
    for x in _feasible_samples(p.feasible, n_samples, rng):
        ax = p.operator(x)
        v = dual_norm(p.space, ax) - dual_norm(p.space, ax - au)
        if v > worst:
            worst, where = v, x
    return CheckReport("norm condition ||Ax|| <= ||Ax - Au||", worst <= tol, worst, where)


@dataclass
class AxiomReport:
    checks: dict

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def lines(self):
        return [c.line() for c in self.checks.values()]


def verify_bifunction_axioms(b, s, n_samples=10_000, tol=1e-8, rng=None):
    """Sample-based check of (A1) F(x,x)=0, (A2) monotonicity,
    (A3) upper hemicontinuity in the first argument, (A4) convexity in y."""
    rng = np.random.default_rng(0) if rng is None else rng
    pts = _feasible_samples(s, n_samples, rng)
    n = pts.shape[0]
    y1 = pts[rng.permutation(n)]
    y2 = pts[rng.permutation(n)]

    a1 = max(abs(b(x, x)) for x in pts)
    a2 = max(b(x, y) + b(y, x) for x, y in zip(pts, y1))
    a3 = -np.inf
    for x, y, z in zip(pts[:1000], y1[:1000], y2[:1000]):
        t = 1e-9
        a3 = max(a3, b(t * z + (1.0 - t) * x, y) - b(x, y))
    a4 = -np.inf
    for x, ya, yb in zip(pts, y1, y2):
        a4 = max(a4, b(x, 0.5 * (ya + yb)) - 0.5 * (b(x, ya) + b(x, yb)))
    # A3 compares values an O(t) step apart; allow for their size
    scale = 1.0 + max(abs(b(x, y)) for x, y in zip(pts[:1000], y1[:1000]))
    return AxiomReport({
        "A1": CheckReport("(A1) F(x,x) = 0", a1 <= tol, a1),
        "A2": CheckReport("(A2) F(x,y) + F(y,x) <= 0", a2 <= tol, a2),
        "A3": CheckReport("(A3) upper hemicontinuity", a3 <= tol * scale, a3),
        "A4": CheckReport("(A4) convexity in y", a4 <= tol, a4),
    })


def verify_vi_membership(p, q, tol=1e-8, n_samples=10_000, rng=None):
    """Check ``<Aq, y - q> >= 0`` for y in C.

    The sampled minimum is combined with the exact support-function minimum
    when the set admits one.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    q = np.asarray(q, dtype=float)
    if not contains(p.feasible, q, 1e-9):
        raise ProblemError(f"q = {q} lies outside the feasible set")
    aq = p.operator(q)
    pts = _feasible_samples(p.feasible, n_samples, rng)
    vals = (pts - q) @ aq
    worst = float(np.min(vals))
    where = pts[int(np.argmin(vals))]
    sup = support(p.feasible, -aq)
    if sup is not None:
        exact = -sup - float(np.dot(aq, q))
        if exact < worst:
            worst, where = exact, None
    euc = SpaceSpec.euclidean(p.space.dim)
    natural = float(np.linalg.norm(q - project(euc, p.feasible, q - aq)))
    return CheckReport("VI membership <Aq, y - q> >= 0", worst >= -tol, worst, where,
                       {"natural_residual": natural})


def verify_relative_nonexpansive(p, n_samples=10_000, tol=1e-8, rng=None):
    """``phi(f_p, f(x)) <= phi(f_p, x)`` at the map's known fixed points."""
    rng = np.random.default_rng(0) if rng is None else rng
    fmap = p.map
    fps = fmap.known_fixed_points(p.space.dim) if fmap is not None else ()
    worst, where = -np.inf, None
    for fp in fps:
        for x in _feasible_samples(p.feasible, n_samples, rng):
            v = lyapunov_phi(p.space, fp, fmap(x)) - lyapunov_phi(p.space, fp, x)
            if v > worst:
                worst, where = v, x
    if not fps:
        worst = 0.0
    return CheckReport("relative nonexpansiveness of f", worst <= tol, worst, where,
                       {"fixed_points": len(fps)})
