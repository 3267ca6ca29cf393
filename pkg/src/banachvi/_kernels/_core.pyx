# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled numerical kernels. Same signatures as ``_fallback``."""

import numpy as np

from libc.math cimport fabs, pow, sqrt, INFINITY, isfinite

BACKEND = "cython"

cdef int _MAX_DOUBLINGS = 200
cdef int _MAX_BISECT = 400


cdef double _norm(const double[::1] x, double p) noexcept nogil:
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double m = 0.0, s = 0.0, v
    for i in range(n):
        v = fabs(x[i])
        if v > m:
            m = v
    if m == 0.0 or not isfinite(m):
        return m
    if p == 2.0:
        for i in range(n):
            v = x[i] / m
            s += v * v
        return m * sqrt(s)
    for i in range(n):
        s += pow(fabs(x[i]) / m, p)
    return m * pow(s, 1.0 / p)


def lp_norm(x, double p):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    return _norm(xv, p)


def duality_map(x, double p):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t i, n = xv.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double nrm, v
    if p == 2.0:
        for i in range(n):
            o[i] = xv[i]
        return out
    nrm = _norm(xv, p)
    for i in range(n):
        v = xv[i]
        if nrm == 0.0 or v == 0.0:
            o[i] = 0.0
        elif v > 0.0:
            o[i] = nrm * pow(v / nrm, p - 1.0)
        else:
            o[i] = -nrm * pow(-v / nrm, p - 1.0)
    return out


cdef inline double _clamp(double t, double lo, double hi) noexcept nogil:
    if t < lo:
        return lo
    if t > hi:
        return hi
    return t


cdef double _coord_root(double w, double beta, double nu, double p) noexcept nogil:
    # beta*|t|^{p-1} sgn t + nu*t = w
    cdef double aw = fabs(w), a = 0.0, b, t, h, dh, tn
    cdef int k
    if aw == 0.0:
        return 0.0
    if beta == 0.0:
        t = INFINITY if nu == 0.0 else aw / nu
    elif nu == 0.0:
        t = pow(aw / beta, 1.0 / (p - 1.0))
    else:
        b = aw / nu
        t = pow(aw / beta, 1.0 / (p - 1.0))
        if t < b:
            b = t
        t = b
        for k in range(100):
            h = beta * pow(t, p - 1.0) + nu * t - aw
            if h < 0.0:
                a = t
            elif h > 0.0:
                b = t
            else:
                break
            dh = beta * (p - 1.0) * pow(t, p - 2.0) + nu
            tn = t - h / dh
            if not isfinite(tn) or tn <= a or tn >= b:
                tn = 0.5 * (a + b)
            if tn == t:
                break
            t = tn
    return t if w > 0.0 else -t


cdef void _y_of_s(const double[::1] w, double s, double nu, const double[::1] lo,
                  const double[::1] hi, double p, double[::1] out) noexcept nogil:
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double beta = pow(s, 2.0 - p) if s > 0.0 else 0.0
    for i in range(n):
        out[i] = _clamp(_coord_root(w[i], beta, nu, p), lo[i], hi[i])


cdef void _separable(const double[::1] xi, double nu, const double[::1] center,
                     const double[::1] lo, const double[::1] hi, double p,
                     double[::1] w, double[::1] out) noexcept nogil:
    cdef Py_ssize_t i, n = xi.shape[0]
    cdef double n0, s_lo, s_hi, mid
    cdef int k
    for i in range(n):
        w[i] = xi[i] + nu * center[i]
    if p == 2.0:
        for i in range(n):
            out[i] = _clamp(w[i] / (1.0 + nu), lo[i], hi[i])
        return
    _y_of_s(w, 0.0, nu, lo, hi, p, out)
    n0 = _norm(out, p)
    if n0 == 0.0:
        return
    s_lo = 0.0
    s_hi = n0 if isfinite(n0) else 1.0
    for k in range(_MAX_DOUBLINGS):
        _y_of_s(w, s_hi, nu, lo, hi, p, out)
        if _norm(out, p) - s_hi <= 0.0:
            break
        s_lo = s_hi
        s_hi *= 2.0
    for k in range(_MAX_BISECT):
        mid = 0.5 * (s_lo + s_hi)
        if mid <= s_lo or mid >= s_hi:
            break
        _y_of_s(w, mid, nu, lo, hi, p, out)
        if _norm(out, p) - mid > 0.0:
            s_lo = mid
        else:
            s_hi = mid
    _y_of_s(w, 0.5 * (s_lo + s_hi), nu, lo, hi, p, out)


def separable_solve(xi, double nu, center, lo, hi, double p):
    """Minimize ||y||_p^2 - 2<y, xi> + nu*||y - center||_2^2 over [lo, hi]."""
    cdef const double[::1] xv = np.ascontiguousarray(xi, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(center, dtype=np.float64)
    cdef const double[::1] lv = np.ascontiguousarray(lo, dtype=np.float64)
    cdef const double[::1] hv = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] w = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        _separable(xv, nu, cv, lv, hv, p, w, o)
    return out


cdef double _gap(const double[::1] xi, const double[::1] a, double b, double mu,
                 const double[::1] zero, const double[::1] lo, const double[::1] hi,
                 double p, double[::1] shifted, double[::1] w,
                 double[::1] out) noexcept nogil:
    cdef Py_ssize_t i, n = xi.shape[0]
    cdef double g = 0.0
    for i in range(n):
        shifted[i] = xi[i] - mu * a[i]
    _separable(shifted, 0.0, zero, lo, hi, p, w, out)
    for i in range(n):
        g += a[i] * out[i]
    return g - b


def box_halfspace_solve(xi, a, double b, lo, hi, double p):
    """Minimize ||y||_p^2 - 2<y, xi> over {y in [lo, hi] : <a, y> <= b}.

    Returns ``(y, feasible)``.
    """
    cdef const double[::1] xv = np.ascontiguousarray(xi, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] lv = np.ascontiguousarray(lo, dtype=np.float64)
    cdef const double[::1] hv = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double[::1] zero = np.zeros(n, dtype=np.float64)
    cdef double[::1] shifted = np.empty(n, dtype=np.float64)
    cdef double[::1] w = np.empty(n, dtype=np.float64)
    cdef double mu_lo = 0.0, mu_hi = 1.0, mid
    cdef int k
    cdef bint feasible = False
    with nogil:
        if _gap(xv, av, b, 0.0, zero, lv, hv, p, shifted, w, o) <= 0.0:
            feasible = True
        else:
            for k in range(_MAX_DOUBLINGS):
                if _gap(xv, av, b, mu_hi, zero, lv, hv, p, shifted, w, o) <= 0.0:
                    feasible = True
                    break
                mu_lo = mu_hi
                mu_hi *= 2.0
            if feasible:
                for k in range(_MAX_BISECT):
                    mid = 0.5 * (mu_lo + mu_hi)
                    if mid <= mu_lo or mid >= mu_hi:
                        break
                    if _gap(xv, av, b, mid, zero, lv, hv, p, shifted, w, o) > 0.0:
                        mu_lo = mid
                    else:
                        mu_hi = mid
                # the upper end is always on the feasible side
                _gap(xv, av, b, mu_hi, zero, lv, hv, p, shifted, w, o)
    return out, bool(feasible)


cdef inline double _quad_h(double a, double b, double c, double lin, double u,
                           double y) noexcept nogil:
    return a * y * y + b * u * y + c * u * u + lin * (y - u)


def quad_resolvent_scan(double a, double b, double c, double m, double shift,
                        double inv_r, double x, ugrid, ygrid):
    """min over ygrid of the scalar resolvent expression, for each u in ugrid.

    Quadratic in y: only the grid ends and the grid points around the
    vertex are evaluated (binary search on the sorted grid).
    """
    cdef const double[::1] uv = np.ascontiguousarray(ugrid, dtype=np.float64)
    ys = np.sort(np.asarray(ygrid, dtype=np.float64))
    cdef const double[::1] yv = ys
    cdef Py_ssize_t i, lo, hi, mid, nu_ = uv.shape[0], ny = yv.shape[0]
    out = np.empty(nu_, dtype=np.float64)
    cdef double[::1] o = out
    cdef double u, best, lin, vertex, h
    with nogil:
        for i in range(nu_):
            u = uv[i]
            lin = m * u + shift + inv_r * (u - x)
            best = _quad_h(a, b, c, lin, u, yv[0])
            h = _quad_h(a, b, c, lin, u, yv[ny - 1])
            if h < best:
                best = h
            if a > 0.0:
                # first index with yv[idx] >= vertex
                vertex = -(b * u + lin) / (2.0 * a)
                lo = 0
                hi = ny
                while lo < hi:
                    mid = (lo + hi) // 2
                    if yv[mid] < vertex:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < ny:
                    h = _quad_h(a, b, c, lin, u, yv[lo])
                    if h < best:
                        best = h
                if lo > 0:
                    h = _quad_h(a, b, c, lin, u, yv[lo - 1])
                    if h < best:
                        best = h
            o[i] = best
    return out
