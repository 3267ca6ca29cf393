"""Iterative solvers.

``run_algorithm1`` and ``run_algorithm2`` are the Banach-space schemes built
from generalized projections and the duality map; ``run_korpelevich``,
``run_tseng`` and ``run_thong`` are the Hilbert-space baselines they extend.
All solvers return an :class:`IterateTrace`.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import ProblemError, ScheduleError
from .geometry import SpaceSpec, duality_map, inverse_duality_map, lyapunov_phi, norm
from .problems import MapSpec
from .resolvent import resolvent
from .schedules import AffineRule, LambdaRule, ScheduleSet
from .sets import (WholeSpace, contains, cut_set, generalized_project,
                   project, projection_residual)

log = logging.getLogger(__name__)

THONG_MAX_BACKTRACKS = 200


@dataclass(frozen=True)
class StopRule:
    tol_step: float = 1e-8
    tol_residual: float = 1e-8
    max_iter: int = 1000

    def __post_init__(self):
        if not (self.tol_step > 0 and self.tol_residual > 0):
            raise ValueError("stopping tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class TraceRow:
    n: int
    x: np.ndarray
    y: np.ndarray
    z: Optional[np.ndarray] = None
    w: Optional[np.ndarray] = None
    u: Optional[np.ndarray] = None
    lam: float = float("nan")
    step_norm: float = float("nan")
    xy_residual: float = float("nan")
    phi_to_solution: Optional[float] = None
    # diagnostics kept in memory only
    yz_residual: Optional[float] = None
    phi_y: Optional[float] = None
    phi_z: Optional[float] = None
    phi_w: Optional[float] = None
    projection_residual: Optional[float] = None
    solution_in_cut: Optional[bool] = None
    backtracks: Optional[int] = None


@dataclass
class IterateTrace:
    algorithm: str
    rows: list = field(default_factory=list)
    status: str = "max_iter"
    final: Optional[np.ndarray] = None
    final_phi: Optional[float] = None
    message: str = ""

    @property
    def iterations(self):
        return len(self.rows)

    def xs(self):
        return np.array([r.x for r in self.rows] + [self.final])


def _check_start(p, x0):
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (p.space.dim,):
        raise ProblemError(f"x0 must have length {p.space.dim}")
    if not contains(p.feasible, x0, 1e-9):
        raise ProblemError(f"x0 = {x0} lies outside the feasible set")
    return x0


def _phi(p, a, b):
    if p.known_solution is None:
        return None
    return lyapunov_phi(p.space, p.known_solution, b if a is None else a)


def _dual_step(space, x, ax, lam):
    """``J^{-1}(Jx - lam*Ax)``."""
    return inverse_duality_map(space, duality_map(space, x) - lam * ax)


def _combine(space, weights, points):
    """``J^{-1}(sum_i w_i J p_i)``."""
    acc = np.zeros(space.dim)
    for wgt, pt in zip(weights, points):
        acc += wgt * duality_map(space, pt)
    return inverse_duality_map(space, acc)


def _resolve_map(p, allow_identity_map):
    if p.map is not None:
        return p.map
    if allow_identity_map:
        return MapSpec.identity()
    raise ProblemError("problem has no map f; pass allow_identity_map=True to use f = identity")


def _finish(trace, x_next, p, status, message=""):
    trace.final = x_next
    trace.status = status
    trace.message = message
    if p.known_solution is not None:
        trace.final_phi = lyapunov_phi(p.space, p.known_solution, x_next)
    return trace


def _stopped(stop, step, xy):
    return step <= stop.tol_step and xy <= stop.tol_residual


def run_algorithm1(p, schedule, x0, stop=StopRule(), allow_identity_map=False):
    """Projection scheme with a forward step and viscosity averaging.

    Each iteration computes

    * ``y_n = Pi_C J^{-1}(Jx_n - lam_n A x_n)``
    * ``z_n = J^{-1}(Jy_n - lam_n A y_n)``
    * ``x_{n+1} = Pi_C J^{-1}(a1 Jx_n + a2 J f(x_n) + a3 Jz_n)``
    """
    space, C, A = p.space, p.feasible, p.operator
    f = _resolve_map(p, allow_identity_map)
    schedule.validate(3, cap=p.step_cap)
    x = _check_start(p, x0)
    q = p.known_solution
    trace = IterateTrace("alg1")
    for n in range(1, stop.max_iter + 1):
        lam = schedule.lambda_rule(n, p.step_cap)
        y = generalized_project(space, C, _dual_step(space, x, A(x), lam))
        z = _dual_step(space, y, A(y), lam)
        a = schedule.alphas(n)
        pre = _combine(space, a, (x, f(x), z))
        x_next = generalized_project(space, C, pre)
        row = TraceRow(
            n=n, x=x, y=y, z=z, lam=lam,
            step_norm=norm(space, x_next - x),
            xy_residual=norm(space, x - y),
            yz_residual=norm(space, y - z),
            projection_residual=projection_residual(space, C, pre, x_next),
        )
        if q is not None:
            row.phi_to_solution = lyapunov_phi(space, q, x)
            row.phi_y = lyapunov_phi(space, q, y)
            row.phi_z = lyapunov_phi(space, q, z)
        trace.rows.append(row)
        if _stopped(stop, row.step_norm, row.xy_residual):
            return _finish(trace, x_next, p, "converged")
        x = x_next
    return _finish(trace, x, p, "max_iter")


def run_algorithm2(p, schedule, x0, stop=StopRule()):
    """Hybrid scheme combining the equilibrium resolvent with a cut projection.

    Each iteration computes

    * ``u_n = K_{r_n} x_n``
    * ``w_n = Pi_C J^{-1}(Ju_n - lam_n A u_n)``
    * ``y_n = Pi_C J^{-1}(Jx_n - lam_n A x_n)``
    * ``C_n = {v in C : phi(v, w_n) <= phi(v, x_n)}``
    * ``z_n = Pi_{C_n} J^{-1}(Jy_n - lam_n A y_n)``
    * ``x_{n+1} = Pi_C J^{-1}(a1 Jx_n + a2 J f(x_n) + a3 Jz_n + a4 Jw_n)``
    """
    if p.bifunction is None:
        raise ProblemError("algorithm 2 needs a bifunction")
    if p.map is None:
        raise ProblemError("algorithm 2 needs a map f")
    space, C, A, f = p.space, p.feasible, p.operator, p.map
    schedule.validate(4, need_r=True, cap=p.step_cap)
    x = _check_start(p, x0)
    q = p.known_solution
    trace = IterateTrace("alg2")
    for n in range(1, stop.max_iter + 1):
        lam = schedule.lambda_rule(n, p.step_cap)
        u = resolvent(p, schedule.r, x)
        w = generalized_project(space, C, _dual_step(space, u, A(u), lam))
        y = generalized_project(space, C, _dual_step(space, x, A(x), lam))
        cut = cut_set(space, C, x, w)
        z = generalized_project(space, cut, _dual_step(space, y, A(y), lam))
        a = schedule.alphas(n)
        pre = _combine(space, a, (x, f(x), z, w))
        x_next = generalized_project(space, C, pre)
        row = TraceRow(
            n=n, x=x, y=y, z=z, w=w, u=u, lam=lam,
            step_norm=norm(space, x_next - x),
            xy_residual=norm(space, x - y),
            yz_residual=norm(space, y - z),
            projection_residual=projection_residual(space, C, pre, x_next),
        )
        if q is not None:
            row.phi_to_solution = lyapunov_phi(space, q, x)
            row.phi_y = lyapunov_phi(space, q, y)
            row.phi_z = lyapunov_phi(space, q, z)
            row.phi_w = lyapunov_phi(space, q, w)
            row.solution_in_cut = contains(cut, q, 1e-10)
        trace.rows.append(row)
        if _stopped(stop, row.step_norm, row.xy_residual):
            return _finish(trace, x_next, p, "converged")
        x = x_next
    return _finish(trace, x, p, "max_iter")


# ---------------------------------------------------------------------------
# Hilbert-space baselines


def _require_euclidean(p):
    if not p.space.is_euclidean:
        raise ProblemError("algorithm requires euclidean space")


def natural_residual(p, x):
    """``||x - P_C(x - Ax)||``, zero exactly at solutions of the VI."""
    return float(np.linalg.norm(x - project(p.space, p.feasible, x - p.operator(x))))


def _hilbert_row(p, n, x, y, x_next, lam, z=None):
    row = TraceRow(n=n, x=x, y=y, z=z, lam=lam,
                   step_norm=float(np.linalg.norm(x_next - x)),
                   xy_residual=float(np.linalg.norm(x - y)))
    if p.known_solution is not None:
        row.phi_to_solution = lyapunov_phi(p.space, p.known_solution, x)
    return row


def run_korpelevich(p, lam, x0, stop=StopRule()):
    """Extragradient: ``y = P_C(x - lam Ax)``, ``x+ = P_C(x - lam Ay)``."""
    _require_euclidean(p)
    if not lam > 0:
        raise ValueError("step must be positive")
    A, C = p.operator, p.feasible
    x = _check_start(p, x0)
    trace = IterateTrace("korpelevich")
    for n in range(1, stop.max_iter + 1):
        y = project(p.space, C, x - lam * A(x))
        x_next = project(p.space, C, x - lam * A(y))
        row = _hilbert_row(p, n, x, y, x_next, lam)
        trace.rows.append(row)
        if _stopped(stop, row.step_norm, row.xy_residual):
            return _finish(trace, x_next, p, "converged")
        x = x_next
    return _finish(trace, x, p, "max_iter")


def run_tseng(p, lam, x0, stop=StopRule()):
    """Forward-backward-forward: ``y = P_C(x - lam Ax)``, ``x+ = P_X(y - lam(Ay - Ax))``.

    ``X`` is the whole space for Lipschitz operators and ``C`` otherwise.
    """
    _require_euclidean(p)
    if not lam > 0:
        raise ValueError("step must be positive")
    A, C = p.operator, p.feasible
    X = WholeSpace(p.space.dim) if A.lipschitz is not None else C
    x = _check_start(p, x0)
    trace = IterateTrace("tseng")
    for n in range(1, stop.max_iter + 1):
        ax = A(x)
        y = project(p.space, C, x - lam * ax)
        x_next = project(p.space, X, y - lam * (A(y) - ax))
        row = _hilbert_row(p, n, x, y, x_next, lam)
        trace.rows.append(row)
        if _stopped(stop, row.step_norm, row.xy_residual):
            return _finish(trace, x_next, p, "converged")
        x = x_next
    return _finish(trace, x, p, "max_iter")


def thong_step_size(p, x, gamma, l, mu):
    """Largest ``lam`` in ``{gamma, gamma*l, ...}`` with
    ``lam ||Ax - Ay|| <= mu ||x - y||`` for ``y = P_C(x - lam Ax)``.

    Returns ``(lam, y, backtracks)``.
    """
    A, C = p.operator, p.feasible
    ax = A(x)
    lam = gamma
    for k in range(THONG_MAX_BACKTRACKS + 1):
        y = project(p.space, C, x - lam * ax)
        if lam * np.linalg.norm(ax - A(y)) <= mu * np.linalg.norm(x - y):
            return lam, y, k
        lam *= l
    raise ScheduleError(
        f"linesearch exceeded {THONG_MAX_BACKTRACKS} backtracks; mu may not match the Lipschitz constant"
    )


def run_thong(p, gamma, l, mu, x0, stop=StopRule(), alpha_seq=AffineRule(0.0, 1.0, 1.0), f=None):
    """Tseng step with Armijo-type step search and viscosity averaging.

    ``y = P_C(x - lam Ax)``, ``z = y - lam(Ay - Ax)``,
    ``x+ = alpha_n f(x) + (1 - alpha_n) z``. The default ``alpha_n`` is ``1/(n+1)``.
    """
    _require_euclidean(p)
    if not (gamma > 0 and 0 < l < 1 and 0 < mu < 1):
        raise ValueError("need gamma > 0, l in (0, 1), mu in (0, 1)")
    f = f if f is not None else _resolve_map(p, allow_identity_map=False)
    A = p.operator
    x = _check_start(p, x0)
    trace = IterateTrace("thong")
    for n in range(1, stop.max_iter + 1):
        lam, y, k = thong_step_size(p, x, gamma, l, mu)
        z = y - lam * (A(y) - A(x))
        a = alpha_seq(n)
        x_next = a * f(x) + (1.0 - a) * z
        row = _hilbert_row(p, n, x, y, x_next, lam, z=z)
        row.backtracks = k
        trace.rows.append(row)
        if _stopped(stop, row.step_norm, row.xy_residual):
            return _finish(trace, x_next, p, "converged")
        x = x_next
    return _finish(trace, x, p, "max_iter")


def default_schedule(n_alpha, r=None, strict_paper=False):
    """Equal weights, capped harmonic steps (plain 1/n when ``strict_paper``)."""
    lam = LambdaRule.harmonic() if strict_paper else LambdaRule.capped_harmonic(0.99)
    return ScheduleSet(lam, tuple(AffineRule(1.0 / n_alpha) for _ in range(n_alpha)), r)
