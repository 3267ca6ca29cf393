"""The equilibrium resolvent K_r.

``K_r x`` is the unique u in C with

    F(u, y) + <Au, y - u> + (1/r) <y - u, Ju - Jx> >= 0   for all y in C.

Since y -> F(u, y) is convex with F(u, u) = 0, this is the same as u
minimizing the left side over C, i.e. the variational inequality
``<g(u), y - u> >= 0`` with ``g(u) = grad_y F(u, u) + Au + (Ju - Jx)/r``.
Solvers below pick the cheapest exact route for that inequality.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import _kernels
from .exceptions import ProblemError, ResolventError
from .geometry import SpaceSpec, duality_map
from .problems import ProblemSpec
from .sets import Box, WholeSpace, generalized_project, project, sample_points

log = logging.getLogger(__name__)

MAX_ITER = 10_000
DAMPING = 0.5
EXAMPLE_COEFFS = (16.0, 9.0, -25.0)


@dataclass(frozen=True, eq=False)
class ResolventQuery:
    problem: ProblemSpec
    r: float
    x: np.ndarray

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"resolvent parameter r must be positive, got {self.r}")
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))

    def solve(self, tol=1e-8):
        return resolvent(self.problem, self.r, self.x, tol)


def expression(problem, r, x, u, ys):
    """The defining expression at u for each row of ``ys``."""
    ys = np.atleast_2d(ys)
    bif = problem.bifunction
    au = problem.operator(u)
    ju_jx = duality_map(problem.space, u) - duality_map(problem.space, x)
    d = ys - u
    lin = d @ au + (d @ ju_jx) / r
    if bif.kind == "zero":
        return lin
    if bif.kind == "scalar_quadratic":
        a, b, c = bif.coeffs
        return a * np.sum(ys * ys, axis=1) + b * (ys @ u) + c * float(u @ u) + lin
    return np.array([bif(u, y) for y in ys]) + lin


def residual_points(s, rng=None):
    """Deterministic grid on C plus its extreme points."""
    if isinstance(s, Box) and np.all(np.isfinite(s.lo)) and np.all(np.isfinite(s.hi)):
        k = max(3, int(round(4001 ** (1.0 / s.dim))))
        axes = [np.linspace(lo, hi, k) for lo, hi in zip(s.lo, s.hi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, s.dim)
        return np.vstack([s.vertices(), grid])
    return sample_points(s, 2000, np.random.default_rng(0) if rng is None else rng)


def residual(problem, r, x, u, points=None):
    """``min_y`` of the defining expression over sampled y (>= 0 at K_r x)."""
    pts = residual_points(problem.feasible) if points is None else points
    return float(np.min(expression(problem, r, x, u, pts)))


def _diag_operator(problem, r, x):
    jx = duality_map(problem.space, x)

    def g(u):
        return (problem.bifunction.diagonal_gradient(u) + problem.operator(u)
                + (duality_map(problem.space, u) - jx) / r)
    return g


def _closed_form(problem, r, x):
    """The example-4-1 closed form ``x/(42r + 1)``, clipped to the interval."""
    s = problem.feasible
    return np.clip(x / (42.0 * r + 1.0), s.lo, s.hi)


def _uses_closed_form(problem):
    b = problem.bifunction
    return (problem.space.dim == 1 and b.kind == "scalar_quadratic"
            and b.coeffs == EXAMPLE_COEFFS and problem.operator.kind == "identity"
            and isinstance(problem.feasible, Box))


def _prox_route(problem, r, x):
    """Exact route for quadratic bifunctions and ``A = mI + shift`` on a box.

    Then ``r*g`` is half the gradient of
    ``||u||_p^2 - 2<u, Jx - r*shift> + r*kappa*||u||_2^2`` with
    ``kappa = 2a + b + m``, a box-constrained kernel problem.
    """
    b = problem.bifunction
    form = problem.operator.scalar_form()
    s = problem.feasible
    if form is None or not isinstance(s, (Box, WholeSpace)):
        return None
    if b.kind == "zero":
        kappa = 0.0
    elif b.kind == "scalar_quadratic" and b.coeffs[0] >= 0.0:
        kappa = 2.0 * b.coeffs[0] + b.coeffs[1]
    else:
        return None
    m, shift = form
    kappa += m
    if kappa < 0.0:
        return None
    dim = problem.space.dim
    xi = duality_map(problem.space, x)
    if shift is not None:
        xi = xi - r * shift
    lo = s.lo if isinstance(s, Box) else np.full(dim, -np.inf)
    hi = s.hi if isinstance(s, Box) else np.full(dim, np.inf)
    return _kernels.separable_solve(xi, r * kappa, np.zeros(dim), lo, hi, problem.space.p)


def _interval_route(problem, r, x):
    """One dimension: g is nondecreasing, so bracket its sign change."""
    s = problem.feasible
    g = _diag_operator(problem, r, x)
    lo, hi = s.lo[0], s.hi[0]
    if not (np.isfinite(lo) and np.isfinite(hi)):
        return None
    if g(np.array([lo]))[0] >= 0.0:
        return np.array([lo])
    if g(np.array([hi]))[0] <= 0.0:
        return np.array([hi])
    root = brentq(lambda t: g(np.array([t]))[0], lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return np.array([root])


def _fixed_point_route(problem, r, x, tol):
    """Damped projected iteration ``u <- (1-d)u + d P_C(u - tau g(u))``.

    ``tau`` is halved whenever the natural residual fails to shrink.
    """
    g = _diag_operator(problem, r, x)
    euc = SpaceSpec.euclidean(problem.space.dim)

    def proj(v):
        return project(euc, problem.feasible, v)

    u = proj(x)
    tau = 1.0
    res = np.linalg.norm(u - proj(u - g(u)))
    for it in range(MAX_ITER):
        if res <= tol * 1e-3:
            return u
        step = proj(u - tau * g(u))
        u_new = (1.0 - DAMPING) * u + DAMPING * step
        res_new = np.linalg.norm(u_new - proj(u_new - g(u_new)))
        if res_new >= res and tau > 1e-12:
            tau *= 0.5
            continue
        u, res = u_new, res_new
    raise ResolventError(
        f"resolvent iteration stopped after {MAX_ITER} steps with natural residual {res:.3e}",
        residual=res,
    )


def resolvent(problem, r, x, tol=1e-8, check=True):
    """``K_r x`` for the problem's bifunction and operator.

    Raises
    ------
    ValueError
        If ``r <= 0``.
    ResolventError
        If no route reaches ``tol`` (the best residual is attached).
    """
    if not r > 0:
        raise ValueError(f"resolvent parameter r must be positive, got {r}")
    if problem.bifunction is None:
        raise ProblemError("problem has no bifunction")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    b = problem.bifunction
    if _uses_closed_form(problem):
        u = _closed_form(problem, r, x)
    elif (b.kind == "zero" and problem.operator.kind == "affine"
          and not np.any(problem.operator.matrix) and not np.any(problem.operator.shift)):
        u = generalized_project(problem.space, problem.feasible, x)
    else:
        u = _prox_route(problem, r, x)
        if u is None and problem.space.dim == 1 and isinstance(problem.feasible, Box):
            u = _interval_route(problem, r, x)
        if u is None:
            u = _fixed_point_route(problem, r, x, tol)
    if check:
        res = residual(problem, r, x, u)
        if res < -tol:
            raise ResolventError(f"resolvent residual {res:.3e} below -{tol:g}", residual=res)
    return u


def oracle_scan(problem, r, x, grid):
    """``(ugrid, h)`` with h(u) = min over the y-grid of the defining expression."""
    s = problem.feasible
    ugrid = np.linspace(s.lo[0], s.hi[0], grid)
    b = problem.bifunction
    form = problem.operator.scalar_form()
    xs = float(x[0])
    if b.kind in ("zero", "scalar_quadratic") and form is not None:
        a, bb, c = b.coeffs if b.kind == "scalar_quadratic" else (0.0, 0.0, 0.0)
        m, shift = form
        sh = 0.0 if shift is None else float(shift[0])
        h = _kernels.quad_resolvent_scan(a, bb, c, m, sh, 1.0 / r, xs, ugrid, ugrid)
    else:
        ys = ugrid[:, None]
        h = np.array([np.min(expression(problem, r, x, np.array([u]), ys)) for u in ugrid])
    return ugrid, h


def resolvent_oracle_1d(problem, r, x, grid=10_001, tol=1e-8):
    """Brute-force resolvent on an interval, independent of the closed form.

    Scans u over a grid, scoring each candidate by the worst value of the
    defining expression over a y-grid, then refines the best cell with a
    bounded scalar search (the inner minimum over y is refined the same way).

    Raises
    ------
    ResolventError
        If no candidate reaches ``h(u) >= -tol``.
    """
    if problem.space.dim != 1 or not isinstance(problem.feasible, Box):
        raise ProblemError("the 1-D oracle needs a one-dimensional interval")
    if not r > 0:
        raise ValueError(f"resolvent parameter r must be positive, got {r}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ugrid, h = oracle_scan(problem, r, x, grid)
    lo, hi = ugrid[0], ugrid[-1]
    step = ugrid[1] - ugrid[0] if grid > 1 else 0.0

    def expr(u, y):
        return float(expression(problem, r, x, np.array([u]), np.array([[y]]))[0])

    def hval(u):
        ys = ugrid
        vals = expression(problem, r, x, np.array([u]), ys[:, None])
        j = int(np.argmin(vals))
        best = float(vals[j])
        a, b = ys[max(j - 1, 0)], ys[min(j + 1, ys.size - 1)]
        if b > a:
            res = minimize_scalar(lambda y: expr(u, y), bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-13})
            best = min(best, float(res.fun))
        # the expression vanishes at y = u, so h(u) <= 0
        return min(best, expr(u, u))

    k = int(np.argmax(h))
    u_best, h_best = ugrid[k], hval(ugrid[k])
    a, b = max(lo, ugrid[k] - 2 * step), min(hi, ugrid[k] + 2 * step)
    if b > a:
        res = minimize_scalar(lambda u: -hval(u), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-13})
        if -res.fun >= h_best:
            u_best, h_best = float(res.x), -float(res.fun)
        for end in (a, b):
            he = hval(end)
            if he > h_best:
                u_best, h_best = end, he
    if h_best < -tol:
        raise ResolventError(
            f"no grid candidate reaches h(u) >= -{tol:g} (best {h_best:.3e})", residual=h_best
        )
    return np.array([u_best])
