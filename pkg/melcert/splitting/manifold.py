"""One-dimensional invariant manifolds of a strobe-map fixed point.

Points are parameterized by σ ≥ 0: the integer part counts (inverse)
iterates, the fractional part places the seed x* ± δ μ^{frac} v inside the
fundamental domain [δ, δμ] on the eigenvector v. Tracing marches σ forward
and halves the step until consecutive points are at most Δs_max apart.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from melcert.config import settings
from melcert.errors import Escape, FoldTooSharp, NoConvergence
from melcert.models import ManifoldTrace, Orbit, StrobeMap
from melcert.separatrix.orbit import orbit_state
from melcert.splitting.strobe import flow, period, strobe_eigenvectors

logger = logging.getLogger(__name__)

MIN_PARAM_STEP = 1e-14
MAX_PARAM_STEP = 0.25
SIDES = ("unstable", "stable")


@dataclass(frozen=True, eq=False)
class ManifoldSeed:
    anchor: np.ndarray
    side: str
    mu: float  # growth per step along the traced direction, > 1
    v: np.ndarray

    @property
    def time_sign(self) -> int:
        return 1 if self.side == "unstable" else -1


def manifold_seed(m: StrobeMap, x_star, side: str) -> ManifoldSeed:
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    mu_u, v_u, mu_s, v_s = strobe_eigenvectors(m, x_star)
    if side == "unstable":
        return ManifoldSeed(np.asarray(x_star, dtype=float), side, abs(mu_u), v_u)
    return ManifoldSeed(np.asarray(x_star, dtype=float), side, 1.0 / abs(mu_s), v_s)


def seed_point(seed: ManifoldSeed, amplitude: float, branch: int = 1) -> np.ndarray:
    return seed.anchor + branch * amplitude * seed.v


def point_at(m: StrobeMap, seed: ManifoldSeed, sigma: float, branch: int = 1, delta: float | None = None) -> np.ndarray:
    """Manifold point with parameter σ."""
    delta = settings.seed_delta if delta is None else delta
    k = int(np.floor(sigma))
    x0 = seed_point(seed, delta * seed.mu ** (sigma - k), branch)
    return flow(m, x0, 0.0, seed.time_sign * k * period(m))


def manifold_trace(
    m: StrobeMap,
    x_star,
    side: str,
    length: float,
    branch: int = 1,
    delta: float | None = None,
    spacing_max: float | None = None,
) -> ManifoldTrace:
    """Polyline of the branch of W^u or W^s through x*, up to the given arclength."""
    delta = settings.seed_delta if delta is None else delta
    spacing_max = settings.spacing_max if spacing_max is None else spacing_max
    seed = manifold_seed(m, x_star, side)

    points = [seed.anchor.copy(), point_at(m, seed, 0.0, branch, delta)]
    arclength = [0.0, float(np.linalg.norm(points[1] - points[0]))]
    sigma, step = 0.0, 0.125
    while arclength[-1] < length:
        trial = sigma + step
        try:
            p = point_at(m, seed, trial, branch, delta)
            gap = float(np.linalg.norm(p - points[-1]))
        except Escape:
            gap = np.inf
        if gap > spacing_max:
            step /= 2.0
            if step < MIN_PARAM_STEP:
                raise FoldTooSharp(f"{side} manifold refinement exhausted at σ = {sigma:.6g} (gap {gap:.3e})")
            continue
        points.append(p)
        arclength.append(arclength[-1] + gap)
        sigma = trial
        if gap < spacing_max / 4.0:
            step = min(2.0 * step, MAX_PARAM_STEP)

    logger.info("Traced %s manifold: %d points, arclength %.4f, σ up to %.3f", side, len(points), arclength[-1], sigma)
    return ManifoldTrace(
        anchor=seed.anchor,
        side=side,
        points=np.array(points),
        arclength=np.array(arclength),
        spacing_max=spacing_max,
    )


def max_spacing(trace: ManifoldTrace) -> float:
    if len(trace.points) < 2:
        return 0.0
    return float(np.max(np.linalg.norm(np.diff(trace.points, axis=0), axis=1)))


def _section_time(m: StrobeMap, seed: ManifoldSeed, theta: float, n: int) -> float:
    """Flow time from the phase-0 section onto the phase-θ section, n whole periods included."""
    omega = m.system.omega
    if seed.side == "unstable":
        return n * period(m) + (theta % (2.0 * np.pi)) / omega
    return n * period(m) + ((-theta) % (2.0 * np.pi)) / omega


def section_crossing(
    m: StrobeMap,
    seed: ManifoldSeed,
    orbit: Orbit,
    theta: float,
    delta: float | None = None,
    max_periods: int = 64,
) -> np.ndarray:
    """Point of the manifold, at forcing phase θ, on the normal line through x^h(0).

    The map `m` must have section phase 0. The flow time is the smallest
    n periods (plus the phase offset) that puts the unperturbed seed
    amplitude inside [δ, δμ]; the amplitude is then fixed by root finding
    on the tangential coordinate (p − x^h(0))·φ(0)/‖φ(0)‖.
    """
    delta = settings.seed_delta if delta is None else delta
    sys = orbit.system
    base = orbit_state(orbit, 0.0)
    tangent = sys.field(base)
    tangent = tangent / np.linalg.norm(tangent)
    saddle = orbit.source.x if seed.side == "unstable" else orbit.target.x
    sign = seed.time_sign

    for n in range(max_periods):
        t_flow = _section_time(m, seed, theta, n)
        start = orbit_state(orbit, -sign * t_flow)
        a_star = float(np.linalg.norm(start - saddle))
        if a_star <= delta * seed.mu:
            break
    else:
        raise NoConvergence(f"{seed.side} seed amplitude still above {delta * seed.mu:.3e} after {max_periods} periods")
    branch = 1 if float(seed.v @ (start - saddle)) >= 0 else -1

    def tangential(log_a: float) -> float:
        p = flow(m, seed_point(seed, np.exp(log_a), branch), 0.0, sign * t_flow)
        return float((p - base) @ tangent)

    lam = (orbit.source if seed.side == "unstable" else orbit.target).lam
    half = min(1.0, 0.5 * t_flow * lam)
    lo, hi = np.log(a_star) - half, np.log(a_star) + half
    f_lo, f_hi = tangential(lo), tangential(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoConvergence(f"{seed.side} manifold does not cross the section near θ = {theta:.6g}")
    log_a = brentq(tangential, lo, hi, xtol=1e-13, maxiter=200)
    return flow(m, seed_point(seed, np.exp(log_a), branch), 0.0, sign * t_flow)
