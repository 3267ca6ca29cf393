"""Pure-Python/NumPy versions of the numerical kernels.

Every function here has a twin with the same signature in ``_core.pyx``.
Results agree with the compiled versions to round-off; the compiled
versions exist only for speed.
"""

import math

import numpy as np
from scipy.optimize import brentq

BACKEND = "python"

_MAX_DOUBLINGS = 200


def lp_norm(x, p):
    x = np.asarray(x, dtype=float)
    m = np.max(np.abs(x)) if x.size else 0.0
    if m == 0.0 or not np.isfinite(m):
        return float(m)
    if p == 2.0:
        return float(m * math.sqrt(np.sum((x / m) ** 2)))
    return float(m * np.sum(np.abs(x / m) ** p) ** (1.0 / p))


def duality_map(x, p):
    x = np.asarray(x, dtype=float)
    if p == 2.0:
        return x.copy()
    nrm = lp_norm(x, p)
    if nrm == 0.0:
        return np.zeros_like(x)
    # ||x||^{2-p} |x_i|^{p-1} sgn(x_i), scaled by the norm to avoid overflow
    return nrm * np.sign(x) * np.abs(x / nrm) ** (p - 1.0)


def _coord_roots(w, beta, nu, p):
    """Solve beta*|t|^{p-1} sgn t + nu*t = w coordinatewise (beta, nu >= 0)."""
    aw = np.abs(w)
    tau = np.zeros_like(aw)
    nz = aw > 0.0
    if beta == 0.0:
        if nu == 0.0:
            tau[nz] = np.inf
        else:
            tau[nz] = aw[nz] / nu
        return np.sign(w) * tau
    if nu == 0.0:
        with np.errstate(over="ignore"):
            tau[nz] = (aw[nz] / beta) ** (1.0 / (p - 1.0))
        return np.sign(w) * tau
    # h(tau) = beta*tau^{p-1} + nu*tau - |w| is concave increasing: the
    # smaller of the two single-term roots lies right of the root, and
    # Newton from there lands left and then climbs monotonically.
    a = np.zeros_like(aw)
    with np.errstate(over="ignore"):
        b = np.minimum(aw / nu, (aw / beta) ** (1.0 / (p - 1.0)))
    t = b.copy()
    for _ in range(100):
        h = beta * t ** (p - 1.0) + nu * t - aw
        a = np.where(h < 0.0, t, a)
        b = np.where(h > 0.0, t, b)
        with np.errstate(divide="ignore", invalid="ignore"):
            dh = beta * (p - 1.0) * t ** (p - 2.0) + nu
            t_new = t - h / dh
        bad = ~np.isfinite(t_new) | (t_new <= a) | (t_new >= b)
        t_new = np.where(bad, 0.5 * (a + b), t_new)
        t_new = np.where(nz, t_new, 0.0)
        if np.array_equal(t_new, t):
            break
        t = t_new
    return np.sign(w) * t


def _clamp(t, lo, hi):
    return np.minimum(np.maximum(t, lo), hi)


def separable_solve(xi, nu, center, lo, hi, p):
    """Minimize ||y||_p^2 - 2<y, xi> + nu*||y - center||_2^2 over [lo, hi].

    The lp term is handled by fixing s = ||y||_p, which decouples the
    coordinates, and then solving the scalar consistency equation
    ||y(s)||_p = s; its left side is nonincreasing in s.
    """
    xi = np.asarray(xi, dtype=float)
    center = np.asarray(center, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    w = xi + nu * center
    if p == 2.0:
        return _clamp(w / (1.0 + nu), lo, hi)

    def y_of(s):
        beta = s ** (2.0 - p) if s > 0.0 else 0.0
        return _clamp(_coord_roots(w, beta, nu, p), lo, hi)

    y0 = y_of(0.0)
    n0 = lp_norm(y0, p)
    if n0 == 0.0:
        return y0

    def excess(s):
        return lp_norm(y_of(s), p) - s

    s_lo = 0.0
    s_hi = n0 if np.isfinite(n0) else 1.0
    for _ in range(_MAX_DOUBLINGS):
        if excess(s_hi) <= 0.0:
            break
        s_lo = s_hi
        s_hi *= 2.0
    if not np.isfinite(n0) and s_lo == 0.0:
        # y(0+) is unbounded; find a finite left end with positive excess
        s_lo = s_hi
        for _ in range(2000):
            s_lo *= 0.5
            if excess(s_lo) > 0.0:
                break
    s = brentq(excess, s_lo, s_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return y_of(s)


def box_halfspace_solve(xi, a, b, lo, hi, p):
    """Minimize ||y||_p^2 - 2<y, xi> over {y in [lo, hi] : <a, y> <= b}.

    Returns ``(y, feasible)``. The halfspace multiplier mu >= 0 is found by
    root search on mu -> <a, y(mu)> - b, where y(mu) is the box solution
    for xi - mu*a.
    """
    xi = np.asarray(xi, dtype=float)
    a = np.asarray(a, dtype=float)
    zero = np.zeros_like(xi)

    def y_of(mu):
        return separable_solve(xi - mu * a, 0.0, zero, lo, hi, p)

    def gap(mu):
        return float(a @ y_of(mu)) - b

    if gap(0.0) <= 0.0:
        return y_of(0.0), True
    mu_hi = 1.0
    for _ in range(_MAX_DOUBLINGS):
        if gap(mu_hi) <= 0.0:
            break
        mu_hi *= 2.0
    else:
        return y_of(mu_hi), False
    mu = brentq(gap, 0.0, mu_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    # step to the feasible side of the root
    delta = max(abs(mu) * 4 * np.finfo(float).eps, 1e-300)
    while gap(mu) > 0.0 and mu < mu_hi:
        mu = min(mu + delta, mu_hi)
        delta *= 2.0
    return y_of(mu), True


def quad_resolvent_scan(a, b, c, m, shift, inv_r, x, ugrid, ygrid):
    """min over ygrid of the scalar resolvent expression, for each u in ugrid.

    The expression is a*y^2 + b*u*y + c*u^2 + (m*u + shift)*(y - u)
    + inv_r*(y - u)*(u - x). It is a quadratic in y, so its minimum over a
    sorted grid sits at an end of the grid or at one of the two grid
    points around the vertex; only those candidates are evaluated.
    """
    ugrid = np.asarray(ugrid, dtype=float)
    ys = np.sort(np.asarray(ygrid, dtype=float))
    u = ugrid[:, None]
    cand = [np.broadcast_to(ys[0], ugrid.shape), np.broadcast_to(ys[-1], ugrid.shape)]
    if a > 0.0:
        # linear coefficient of y for each u
        lin = b * ugrid + m * ugrid + shift + inv_r * (ugrid - x)
        k = np.searchsorted(ys, -lin / (2.0 * a))
        cand += [ys[np.clip(k - 1, 0, ys.size - 1)], ys[np.clip(k, 0, ys.size - 1)]]
    y = np.stack(cand, axis=1)
    d = y - u
    h = a * y * y + b * u * y + c * u * u + (m * u + shift) * d + inv_r * d * (u - x)
    return h.min(axis=1)
