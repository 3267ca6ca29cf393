"""Closed convex sets and the generalized projection onto them.

The generalized projection of ``x`` onto ``C`` is the minimizer over ``C``
of ``phi(y, x) = ||y||^2 - 2<y, Jx> + ||x||^2``. Up to constants this is
``||y||^2 - 2<y, xi>`` with ``xi = Jx``, which the kernels minimize exactly
over boxes (and boxes cut by one halfspace). Balls and halfspaces reduce to
one scalar multiplier search; general intersections fall back to Dykstra's
method with Bregman projections.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, linprog

from . import _kernels
from .exceptions import DimensionError, ProjectionError
from .geometry import (SpaceSpec, duality_map, inverse_duality_map,
                       lyapunov_phi, norm)

log = logging.getLogger(__name__)

_EPS = np.finfo(float).eps
DYKSTRA_MAX_ITER = 10_000
DYKSTRA_TOL = 1e-10


def _arr(x):
    return np.atleast_1d(np.asarray(x, dtype=float))


@dataclass(frozen=True, eq=False)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = _arr(self.lo), _arr(self.hi)
        if lo.shape != hi.shape:
            raise DimensionError("box bounds have different lengths")
        if np.any(lo > hi):
            raise ValueError("box requires lo <= hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return self.lo.shape[0]

    def vertices(self):
        lo, hi = np.where(np.isfinite(self.lo), self.lo, 0.0), np.where(np.isfinite(self.hi), self.hi, 0.0)
        grids = np.stack(np.meshgrid(*[[a, b] for a, b in zip(lo, hi)], indexing="ij"), -1)
        return np.unique(grids.reshape(-1, self.dim), axis=0)

    def to_dict(self):
        return {"kind": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True, eq=False)
class Ball:
    """Euclidean ball ``{v : ||v - center||_2 <= radius}``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _arr(self.center))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self):
        return self.center.shape[0]

    def to_dict(self):
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Halfspace:
    """``{v : <v, normal> <= offset}``; the normal is a dual vector."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", _arr(self.normal))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self):
        return self.normal.shape[0]

    def to_dict(self):
        return {"kind": "halfspace", "normal": self.normal.tolist(), "offset": self.offset}


@dataclass(frozen=True, eq=False)
class WholeSpace:
    dim: int

    def to_dict(self):
        return {"kind": "whole_space", "dim": self.dim}


@dataclass(frozen=True, eq=False)
class Intersection:
    members: tuple
    probe: bool = field(default=True, repr=False)

    def __post_init__(self):
        flat = []
        for m in self.members:
            flat.extend(m.members if isinstance(m, Intersection) else [m])
        if not flat:
            raise ValueError("intersection needs at least one member")
        dims = {m.dim for m in flat}
        if len(dims) != 1:
            raise DimensionError("intersection members have different dimensions")
        object.__setattr__(self, "members", tuple(flat))
        if self.probe:
            # feasibility probe: the euclidean projection of the origin
            try:
                z = project(SpaceSpec.euclidean(self.dim), self, np.zeros(self.dim))
            except ProjectionError as exc:
                raise ValueError(f"intersection is empty: {exc}") from exc
            if not contains(self, z, 1e-7):
                raise ValueError("intersection is empty")

    @property
    def dim(self):
        return self.members[0].dim

    def to_dict(self):
        return {"kind": "intersection", "members": [m.to_dict() for m in self.members]}


SetSpec = Box | Ball | Halfspace | WholeSpace | Intersection


@dataclass(frozen=True, eq=False)
class CutSet:
    """``C_n = {v in C : <v, normal> <= rhs}``.

    Built from ``phi(v, w_n) <= phi(v, x_n)``, which rearranges to
    ``2<v, Jx_n - Jw_n> <= ||x_n||^2 - ||w_n||^2``.
    """

    base: object
    normal: np.ndarray
    rhs: float

    @property
    def dim(self):
        return self.base.dim

    @property
    def degenerate(self):
        return not np.any(self.normal)

    def as_set(self):
        if self.degenerate:
            if self.rhs < 0.0:
                raise ProjectionError("infeasible cut: zero normal with negative right-hand side")
            return self.base
        return Intersection((self.base, Halfspace(self.normal, self.rhs)), probe=False)


def from_dict(d):
    """Build a set from its JSON form (see ``to_dict``)."""
    kind = d["kind"]
    if kind == "box":
        return Box(d["lo"], d["hi"])
    if kind == "ball":
        return Ball(d["center"], d["radius"])
    if kind == "halfspace":
        return Halfspace(d["normal"], d["offset"])
    if kind == "whole_space":
        return WholeSpace(int(d["dim"]))
    if kind == "intersection":
        return Intersection(tuple(from_dict(m) for m in d["members"]))
    raise ValueError(f"unknown set kind {kind!r}")


def _check(s, x):
    x = _arr(x)
    if x.shape != (s.dim,):
        raise DimensionError(f"expected a vector of length {s.dim}, got shape {x.shape}")
    return x


def contains(s, x, tol=1e-10):
    """True iff ``x`` satisfies every defining inequality of ``s`` up to ``tol``."""
    x = _check(s, x)
    if isinstance(s, WholeSpace):
        return True
    if isinstance(s, Box):
        return bool(np.all(x >= s.lo - tol) and np.all(x <= s.hi + tol))
    if isinstance(s, Ball):
        return bool(np.linalg.norm(x - s.center) <= s.radius + tol)
    if isinstance(s, Halfspace):
        return bool(np.dot(x, s.normal) <= s.offset + tol)
    if isinstance(s, Intersection):
        return all(contains(m, x, tol) for m in s.members)
    if isinstance(s, CutSet):
        return contains(s.base, x, tol) and bool(np.dot(x, s.normal) <= s.rhs + tol)
    raise TypeError(f"not a set: {s!r}")


# ---------------------------------------------------------------------------
# generalized projection


def _full(dim, v):
    return np.full(dim, v, dtype=float)


def _project_box(space, box, x):
    return _kernels.separable_solve(duality_map(space, x), 0.0, np.zeros(space.dim),
                                    box.lo, box.hi, space.p)


def _project_ball(space, ball, x):
    if np.linalg.norm(x - ball.center) <= ball.radius:
        return x.copy()
    if space.is_euclidean:
        d = x - ball.center
        return ball.center + ball.radius * d / np.linalg.norm(d)
    xi = duality_map(space, x)
    lo, hi = _full(space.dim, -np.inf), _full(space.dim, np.inf)

    def y_of(nu):
        return _kernels.separable_solve(xi, nu, ball.center, lo, hi, space.p)

    def gap(nu):
        return np.linalg.norm(y_of(nu) - ball.center) - ball.radius

    if gap(0.0) <= 0.0:
        # outside by less than the solver can resolve
        return y_of(0.0)
    nu_hi = 1.0
    while gap(nu_hi) > 0.0:
        nu_hi *= 2.0
        if nu_hi > 1e300:
            raise ProjectionError("ball multiplier search diverged")
    nu = brentq(gap, 0.0, nu_hi, xtol=1e-300, rtol=4 * _EPS, maxiter=500)
    return _feasible_side(y_of, gap, nu, nu_hi)


def _feasible_side(y_of, gap, t, t_hi):
    """Nudge a multiplier root upward until the point is inside the set."""
    delta = max(abs(t) * 4 * _EPS, 1e-300)
    while gap(t) > 0.0 and t < t_hi:
        t = min(t + delta, t_hi)
        delta *= 2.0
    return y_of(t)


def _project_with_cut(space, base_proj, a, b, x):
    """Generalized projection onto ``T ∩ {<v, a> <= b}`` given one onto ``T``.

    Minimizing phi(y, x) + 2*mu*<a, y> over T is the projection of
    J^{-1}(Jx - mu*a) onto T, and <a, y(mu)> is nonincreasing in mu.
    """
    xi = duality_map(space, x)

    def y_of(mu):
        return base_proj(inverse_duality_map(space, xi - mu * a))

    def gap(mu):
        return float(np.dot(a, y_of(mu))) - b

    if gap(0.0) <= 0.0:
        return y_of(0.0)
    mu_hi = 1.0
    while gap(mu_hi) > 0.0:
        mu_hi *= 2.0
        if mu_hi > 1e300:
            raise ProjectionError("infeasible cut: halfspace does not meet the set")
    mu = brentq(gap, 0.0, mu_hi, xtol=1e-300, rtol=4 * _EPS, maxiter=500)
    return _feasible_side(y_of, gap, mu, mu_hi)


def _dykstra(space, members, x):
    """Dykstra's method with Bregman (phi) projections, run in the dual."""
    dual = [np.zeros(space.dim) for _ in members]
    y = x.copy()
    for it in range(DYKSTRA_MAX_ITER):
        y_prev = y
        for i, m in enumerate(members):
            jy = duality_map(space, y)
            target = inverse_duality_map(space, jy + dual[i])
            y_new = project(space, m, target)
            dual[i] = jy + dual[i] - duality_map(space, y_new)
            y = y_new
        if (np.linalg.norm(y - y_prev) <= DYKSTRA_TOL * (1.0 + np.linalg.norm(y))
                and all(contains(m, y, 1e-9) for m in members)):
            return y
    raise ProjectionError(
        f"Dykstra projection did not converge in {DYKSTRA_MAX_ITER} sweeps",
        residual=float(np.linalg.norm(y - y_prev)),
    )


def _project_intersection(space, s, x):
    halves = [m for m in s.members if isinstance(m, Halfspace)]
    others = [m for m in s.members if not isinstance(m, (Halfspace, WholeSpace))]
    if len(others) > 1 or len(halves) > 2:
        return _dykstra(space, list(s.members), x)
    base = others[0] if others else WholeSpace(space.dim)
    if not halves:
        return project(space, base, x)
    if isinstance(base, (Box, WholeSpace)):
        lo = base.lo if isinstance(base, Box) else _full(space.dim, -np.inf)
        hi = base.hi if isinstance(base, Box) else _full(space.dim, np.inf)
        h0 = halves[0]

        def inner(v):
            y, ok = _kernels.box_halfspace_solve(duality_map(space, v), h0.normal,
                                                 h0.offset, lo, hi, space.p)
            if not ok:
                raise ProjectionError("infeasible cut: halfspace does not meet the set")
            return y
    else:
        h0 = halves[0]

        def inner(v):
            return _project_with_cut(space, lambda u: project(space, base, u),
                                     h0.normal, h0.offset, v)
    if len(halves) == 1:
        return inner(x)
    h1 = halves[1]
    return _project_with_cut(space, inner, h1.normal, h1.offset, x)


def project(space, s, x):
    """Generalized projection ``Pi_C x`` (the minimizer of phi(., x) over C)."""
    x = _check(s, x)
    if space.dim != s.dim:
        raise DimensionError(f"space has dim {space.dim}, set has dim {s.dim}")
    if isinstance(s, WholeSpace):
        return x.copy()
    if isinstance(s, Box):
        return _project_box(space, s, x)
    if isinstance(s, Ball):
        return _project_ball(space, s, x)
    if isinstance(s, Halfspace):
        if not np.any(s.normal):
            if s.offset < 0:
                raise ProjectionError("empty halfspace")
            return x.copy()
        return _project_intersection(space, Intersection((s,), probe=False), x)
    if isinstance(s, Intersection):
        return _project_intersection(space, s, x)
    if isinstance(s, CutSet):
        return project(space, s.as_set(), x)
    raise TypeError(f"not a set: {s!r}")


def generalized_project(space, s, x, check=True):
    """Generalized projection with an optional optimality check.

    Raises
    ------
    ProjectionError
        If the characterization residual ``max_y <y - z, Jx - Jz>`` over
        the set exceeds 1e-8 (scaled by the size of the data).
    """
    z = project(space, s, x)
    if check and not space.is_euclidean:
        res = projection_residual(space, s, x, z)
        scale = 1.0 + norm(space, x) ** 2
        if res > 1e-8 * scale:
            raise ProjectionError(f"projection residual {res:.3e} above tolerance", residual=res)
    return z


def cut_set(space, base, x_n, w_n):
    """The set ``{v in base : phi(v, w_n) <= phi(v, x_n)}`` in halfspace form."""
    jx = duality_map(space, x_n)
    jw = duality_map(space, w_n)
    nx, nw = norm(space, x_n), norm(space, w_n)
    normal = jx - jw
    rhs = 0.5 * (nx * nx - nw * nw)
    return CutSet(base=base, normal=normal, rhs=rhs)


def cut_contains_direct(space, cut_base, v, x_n, w_n, tol=1e-10):
    """Membership in the cut set from the defining phi inequality."""
    slack = 0.5 * (lyapunov_phi(space, v, w_n) - lyapunov_phi(space, v, x_n))
    return contains(cut_base, v, tol) and slack <= tol


def project_onto_cut(space, cut, x):
    return generalized_project(space, cut, x)


# ---------------------------------------------------------------------------
# sampling and optimality residuals


def _bounding_box(s, radius=10.0):
    """Finite box containing the bounded part of ``s`` we sample from."""
    if isinstance(s, Box):
        lo = np.where(np.isfinite(s.lo), s.lo, -radius)
        hi = np.where(np.isfinite(s.hi), s.hi, radius)
        return lo, hi
    if isinstance(s, Ball):
        return s.center - s.radius, s.center + s.radius
    if isinstance(s, Intersection):
        boxes = [_bounding_box(m, radius) for m in s.members
                 if isinstance(m, (Box, Ball))]
        if boxes:
            lo = np.max([b[0] for b in boxes], axis=0)
            hi = np.min([b[1] for b in boxes], axis=0)
            return lo, hi
    return _full(s.dim, -radius), _full(s.dim, radius)


def sample_points(s, n, rng, radius=10.0):
    """``n`` points of ``s``: uniform in a bounding box, mapped into ``s``.

    Points that fall outside are replaced by their euclidean projection, so
    boundary points (where the linear residuals peak) are well represented.
    """
    lo, hi = _bounding_box(s, radius)
    pts = rng.uniform(lo, hi, size=(n, s.dim))
    if isinstance(s, Box):
        return pts
    euc = SpaceSpec.euclidean(s.dim)
    out = np.empty_like(pts)
    for i, p in enumerate(pts):
        out[i] = p if contains(s, p, 0.0) else project(euc, s, p)
    return out


def support(s, g):
    """``sup_{y in s} <y, g>`` where closed form or an LP is available, else None."""
    g = _arr(g)
    if isinstance(s, Box):
        return float(np.sum(np.maximum(s.lo * g, s.hi * g)))
    if isinstance(s, Ball):
        return float(np.dot(s.center, g) + s.radius * np.linalg.norm(g))
    if isinstance(s, WholeSpace):
        return 0.0 if not np.any(g) else np.inf
    members = s.members if isinstance(s, Intersection) else (s,)
    if all(isinstance(m, (Box, Halfspace, WholeSpace)) for m in members):
        a_ub = [m.normal for m in members if isinstance(m, Halfspace)]
        b_ub = [m.offset for m in members if isinstance(m, Halfspace)]
        bounds = [(-np.inf, np.inf)] * s.dim
        for m in members:
            if isinstance(m, Box):
                bounds = [(max(b[0], lo), min(b[1], hi))
                          for b, lo, hi in zip(bounds, m.lo, m.hi)]
        bounds = [(None if not np.isfinite(a) else a, None if not np.isfinite(b) else b)
                  for a, b in bounds]
        res = linprog(-g, A_ub=np.array(a_ub) if a_ub else None,
                      b_ub=np.array(b_ub) if b_ub else None, bounds=bounds,
                      method="highs")
        if res.status == 3:
            return np.inf
        if res.status == 0:
            return float(-res.fun)
    return None


def projection_residual(space, s, x, z, samples=None):
    """``max_y <y - z, Jx - Jz>`` over ``s`` (zero at the exact projection).

    With ``samples`` the maximum runs over those points; otherwise the exact
    support function is used when available, with a seeded sample fallback.
    """
    if isinstance(s, CutSet):
        s = s.as_set()
    g = duality_map(space, x) - duality_map(space, z)
    zg = float(np.dot(z, g))
    if samples is None:
        sup = support(s, g)
        if sup is None:
            samples = sample_points(s, 1000, np.random.default_rng(0))
        else:
            return max(sup - zg, 0.0) if np.isfinite(sup) else np.inf
    return max(float(np.max(samples @ g)) - zg, 0.0)
