"""Stroboscopic map of the forced system and its hyperbolic fixed points.

The map advances ẋ = J DH(x) + ε g(x, ωt + θ₀) over one forcing period
2π/ω starting at t = 0. The inverse runs the same field backwards in time.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.integrate import solve_ivp

from melcert.config import settings
from melcert.errors import Escape, LostHyperbolicity, NoConvergence, StepFailure
from melcert.models import Orbit, PlanarSystem, StrobeMap
from melcert.separatrix.orbit import orbit_state

logger = logging.getLogger(__name__)

FD_STEP = 1e-5
FIXED_TOL = 1e-11
SHOOT_SEGMENTS = 8
SHOOT_TOL_FACTOR = 10.0
POLISH_STEPS = 5
MIN_DAMPING = 1.0 / 1024


def strobe_map(
    sys: PlanarSystem,
    eps: float,
    theta0: float = 0.0,
    orbit: Orbit | None = None,
    rtol: float | None = None,
) -> StrobeMap:
    """StrobeMap whose escape box is box_factor × the separatrix extent."""
    box = np.inf
    if orbit is not None:
        ts = np.linspace(-orbit.t_orbit, orbit.t_orbit, 801) + orbit.shift
        extent = float(np.max(np.linalg.norm(orbit_state(orbit, ts), axis=0)))
        box = settings.box_factor * max(extent, 1.0)
    rtol = settings.strobe_rtol if rtol is None else rtol
    return StrobeMap(system=sys, eps=float(eps), theta0=float(theta0) % (2.0 * np.pi), rtol=rtol, box=box)


def _rhs(m: StrobeMap):
    sys = m.system
    h1, h2 = sys.grad
    if m.eps == 0.0 or sys.g.is_zero:

        def field(t, x):
            return np.array([h2(x[0], x[1]), -h1(x[0], x[1])])

        return field

    a0, a, b = sys.real_form
    omega, theta0, eps = sys.omega, m.theta0, m.eps

    def field(t, x):
        x1, x2 = x
        theta = omega * t + theta0
        g1, g2 = a0[0](x1, x2), a0[1](x1, x2)
        for j, (aj, bj) in enumerate(zip(a, b), start=1):
            cj, sj = np.cos(j * theta), np.sin(j * theta)
            g1 += aj[0](x1, x2) * cj + bj[0](x1, x2) * sj
            g2 += aj[1](x1, x2) * cj + bj[1](x1, x2) * sj
        return np.array([h2(x1, x2) + eps * g1, -h1(x1, x2) + eps * g2])

    return field


def flow(m: StrobeMap, x, t_from: float, t_to: float) -> np.ndarray:
    """Solution at t_to of the trajectory through x at t_from (either direction)."""
    x = np.asarray(x, dtype=float)
    if np.hypot(x[0], x[1]) > m.box:
        raise Escape(f"start point {x.tolist()} lies outside the box of radius {m.box:.3g}")
    if t_from == t_to:
        return x.copy()
    events = None
    if np.isfinite(m.box):

        def leave(t, y):
            return m.box - float(np.hypot(y[0], y[1]))

        leave.terminal = True
        events = [leave]

    sol = solve_ivp(_rhs(m), (t_from, t_to), x, method="DOP853", rtol=m.rtol, atol=m.atol, events=events)
    if sol.status == 1:
        raise Escape(f"trajectory from {x.tolist()} left the box of radius {m.box:.3g} at t = {sol.t[-1]:.6g}")
    if not sol.success:
        raise StepFailure(f"strobe integration failed: {sol.message}")
    return sol.y[:, -1]


def period(m: StrobeMap) -> float:
    return 2.0 * np.pi / m.system.omega


def strobe(m: StrobeMap, x) -> np.ndarray:
    return flow(m, x, 0.0, period(m))


def inverse_strobe(m: StrobeMap, x) -> np.ndarray:
    return flow(m, x, period(m), 0.0)


def flow_jacobian(m: StrobeMap, x, t_from: float, t_to: float, h: float = FD_STEP) -> np.ndarray:
    """Central finite-difference Jacobian of the flow from t_from to t_to."""
    x = np.asarray(x, dtype=float)
    jac = np.empty((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        jac[:, k] = (flow(m, x + e, t_from, t_to) - flow(m, x - e, t_from, t_to)) / (2.0 * h)
    return jac


def strobe_jacobian(m: StrobeMap, x, h: float = FD_STEP, inverse: bool = False) -> np.ndarray:
    """Central finite-difference Jacobian of the (inverse) strobe map."""
    if inverse:
        return flow_jacobian(m, x, period(m), 0.0, h)
    return flow_jacobian(m, x, 0.0, period(m), h)


def _shooting_residual(m: StrobeMap, xs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    n = len(xs)
    return np.concatenate([flow(m, xs[i], ts[i], ts[i + 1]) - xs[(i + 1) % n] for i in range(n)])


def _shooting_matrix(m: StrobeMap, xs: np.ndarray, ts: np.ndarray) -> np.ndarray:
    n = len(xs)
    big = np.zeros((2 * n, 2 * n))
    for i in range(n):
        j = (i + 1) % n
        big[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = flow_jacobian(m, xs[i], ts[i], ts[i + 1])
        big[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] -= np.eye(2)
    return big


def _damped_step(m: StrobeMap, xs: np.ndarray, ts: np.ndarray, step: np.ndarray, norm0: float):
    """Halve the Newton step until the shooting residual decreases."""
    alpha = 1.0
    escaped = False
    while alpha >= MIN_DAMPING:
        trial = xs - alpha * step
        try:
            res = _shooting_residual(m, trial, ts)
        except Escape:
            escaped = True
        else:
            if np.linalg.norm(res) < norm0:
                return trial, res
        alpha /= 2.0
    if escaped:
        raise Escape(f"every damped shooting step from {xs[0].tolist()} leaves the box of radius {m.box:.3g}")
    raise NoConvergence(f"shooting residual {norm0:.3e} does not decrease along the Newton direction")


def _polish_fixed_point(m: StrobeMap, x: np.ndarray, tol: float) -> np.ndarray:
    for _ in range(POLISH_STEPS):
        residual = strobe(m, x) - x
        if np.linalg.norm(residual) <= tol:
            return x
        try:
            x = x - np.linalg.solve(strobe_jacobian(m, x) - np.eye(2), residual)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Newton step at {x.tolist()}") from exc
    residual = float(np.linalg.norm(strobe(m, x) - x))
    if residual > tol:
        raise NoConvergence(f"strobe fixed point residual {residual:.3e} above {tol:.1e} at {x.tolist()}")
    return x


def periodic_saddle(
    m: StrobeMap,
    guess,
    tol: float = FIXED_TOL,
    max_iter: int | None = None,
    segments: int = SHOOT_SEGMENTS,
) -> tuple[np.ndarray, np.ndarray]:
    """Hyperbolic fixed point of the strobe map; returns (x*, multipliers).

    Multiple shooting over `segments` slices of the period keeps each Newton
    model inside the linear range of one slice, and every step is damped
    until the residual decreases. A single-shooting Newton pass then
    polishes x* to `tol`.
    """
    max_iter = settings.newton_max_iter if max_iter is None else max_iter
    ts = period(m) * np.arange(segments + 1) / segments
    xs = np.tile(np.asarray(guess, dtype=float), (segments, 1))
    res = _shooting_residual(m, xs, ts)
    for it in range(max_iter):
        norm0 = float(np.linalg.norm(res))
        if norm0 <= SHOOT_TOL_FACTOR * tol:
            break
        try:
            step = np.linalg.solve(_shooting_matrix(m, xs, ts), res).reshape(segments, 2)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular shooting matrix at {xs[0].tolist()}") from exc
        xs, res = _damped_step(m, xs, ts, step, norm0)
    else:
        raise NoConvergence(f"strobe fixed point not found from {np.asarray(guess).tolist()} in {max_iter} steps")

    x = _polish_fixed_point(m, xs[0], tol)
    vals = np.linalg.eigvals(strobe_jacobian(m, x))
    if np.any(np.abs(vals.imag) > 0.0) or not np.max(np.abs(vals)) > 1.0 > np.min(np.abs(vals)):
        raise LostHyperbolicity(f"fixed point {x.tolist()} is not hyperbolic: multipliers {vals.tolist()}")
    multipliers = np.sort(vals.real)[::-1]
    logger.debug("Periodic saddle %s after %d shooting steps, multipliers %s", x, it, multipliers)
    return x, multipliers


def _orient(v: np.ndarray) -> np.ndarray:
    """Unit vector with a positive leading nonzero component."""
    v = v / np.linalg.norm(v)
    lead = v[0] if abs(v[0]) > 1e-12 else v[1]
    return v if lead > 0 else -v


def strobe_eigenvectors(m: StrobeMap, x_star) -> tuple[float, np.ndarray, float, np.ndarray]:
    """(μ_u, v_u, μ_s, v_s) of the strobe Jacobian at a hyperbolic fixed point."""
    vals, vecs = np.linalg.eig(strobe_jacobian(m, x_star))
    vals, vecs = vals.real, vecs.real
    order = np.argsort(np.abs(vals))[::-1]
    (mu_u, mu_s), (k_u, k_s) = vals[order], order
    if not abs(mu_u) > 1.0 > abs(mu_s):
        raise NoConvergence(f"fixed point {np.asarray(x_star).tolist()} is not hyperbolic: multipliers {vals.tolist()}")
    v_u = _orient(vecs[:, k_u])
    v_s = _orient(vecs[:, k_s])
    return float(mu_u), v_u, float(mu_s), v_s
