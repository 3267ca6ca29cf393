"""Finite-dimensional smooth, 2-uniformly convex Banach spaces.

A space is R^dim with either the euclidean norm or an lp norm with
p in (1, 2]. Points of E and functionals of E* share coordinates and are
paired by the ordinary dot product, so the dual of lp is lq with
q = p/(p - 1). Vectors are plain 1-d float arrays.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import DimensionError


@dataclass(frozen=True)
class SpaceSpec:
    """Coordinate model of a Banach space.

    Attributes
    ----------
    dim : int
        Dimension of the coordinate space.
    p : float
        Norm exponent; 2.0 is the euclidean (Hilbert) case.
    c : float
        2-uniform convexity constant ``c`` (0 < c <= 1) entering the bound
        ``||x - y|| <= (2/c**2) ||Jx - Jy||`` and the step cap ``c**2 * alpha / 2``.
    """

    dim: int
    p: float = 2.0
    c: float = 1.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        if not 1.0 < self.p <= 2.0:
            raise ValueError(f"p must lie in (1, 2], got {self.p!r}")
        if not 0.0 < self.c <= 1.0:
            raise ValueError(f"c must lie in (0, 1], got {self.c!r}")

    @classmethod
    def euclidean(cls, dim):
        return cls(dim=dim, p=2.0, c=1.0)

    @classmethod
    def lp(cls, dim, p):
        p = float(p)
        if not 1.0 < p <= 2.0:
            raise ValueError(f"p must lie in (1, 2], got {p!r}")
        return cls(dim=dim, p=p, c=math.sqrt(p - 1.0))

    @property
    def is_euclidean(self):
        return self.p == 2.0

    @property
    def q(self):
        """Exponent of the dual norm."""
        return self.p / (self.p - 1.0)

    @property
    def c_inv(self):
        return 1.0 / self.c

    @property
    def name(self):
        return "euclidean" if self.is_euclidean else f"lp({self.p:g})"

    def to_dict(self):
        if self.is_euclidean:
            return {"dim": self.dim, "norm": "euclidean"}
        return {"dim": self.dim, "norm": "lp", "p": self.p}


def _vec(space, x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != space.dim:
        raise DimensionError(
            f"expected a vector of length {space.dim}, got shape {x.shape}"
        )
    return x


def pairing(x, xs):
    """<x, x*> in the standard coordinate pairing."""
    return float(np.dot(x, xs))


def norm(space, x):
    return _kernels.lp_norm(_vec(space, x), space.p)


def dual_norm(space, xs):
    return _kernels.lp_norm(_vec(space, xs), space.q)


def duality_map(space, x):
    """Normalized duality map J: E -> E*.

    For lp, ``(Jx)_i = ||x||^(2-p) |x_i|^(p-1) sgn(x_i)``; the identity in
    the euclidean case. ``J(0) = 0``.
    """
    return _kernels.duality_map(_vec(space, x), space.p)


def inverse_duality_map(space, xs):
    """J^{-1} = J*, the duality map of the dual norm."""
    return _kernels.duality_map(_vec(space, xs), space.q)


def lyapunov_phi(space, x, y):
    """phi(x, y) = ||x||^2 - 2<x, Jy> + ||y||^2."""
    x = _vec(space, x)
    y = _vec(space, y)
    nx = norm(space, x)
    ny = norm(space, y)
    val = nx * nx - 2.0 * pairing(x, duality_map(space, y)) + ny * ny
    # phi >= (||x|| - ||y||)^2 >= 0; clip round-off below zero
    return max(val, 0.0)


def v_functional(space, x, xs):
    """V(x, x*) = ||x||^2 - 2<x, x*> + ||x*||_*^2."""
    x = _vec(space, x)
    xs = _vec(space, xs)
    nx = norm(space, x)
    nxs = dual_norm(space, xs)
    return max(nx * nx - 2.0 * pairing(x, xs) + nxs * nxs, 0.0)
