"""Measured separatrix splitting against the first-order Melnikov law.

At forcing phase θ the unstable manifold of the perturbed saddle near x₋
and the stable manifold of the one near x₊ cross the normal line through
x^h(0). Their signed distance along DH(x^h(0))/‖DH(x^h(0))‖ is d(θ), and
d(θ)‖DH(x^h(0))‖/ε → M(θ) as ε → 0.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from melcert.melnikov.coefficients import eval_melnikov, melnikov_series
from melcert.models import MelnikovSeries, Orbit, PlanarSystem, SplittingPoint
from melcert.parallel import run_parallel
from melcert.separatrix.orbit import orbit_state, shift_orbit
from melcert.separatrix.shooting import find_orbit
from melcert.splitting.manifold import manifold_seed, section_crossing
from melcert.splitting.strobe import periodic_saddle, strobe_map

logger = logging.getLogger(__name__)


def theta_grid(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n


def splitting_profile(
    sys: PlanarSystem,
    eps: float,
    thetas: Sequence[float],
    orbit: Orbit | None = None,
    section: float = 0.0,
    series: MelnikovSeries | None = None,
    threads: int | None = None,
) -> list[SplittingPoint]:
    """d(θ) on the grid, the section placed at x^h(section)."""
    orbit = find_orbit(sys) if orbit is None else orbit
    if section:
        orbit = shift_orbit(orbit, -section)
        series = None
    series = melnikov_series(orbit, sys, threads=threads) if series is None else series
    thetas = [float(t) for t in thetas]
    m_theta = [float(eval_melnikov(series, t)) for t in thetas]

    base = orbit_state(orbit, 0.0)
    grad = sys.gradient_at(base)
    grad_norm = float(np.linalg.norm(grad))
    normal = grad / grad_norm

    if eps == 0.0:
        logger.info("ε = 0: the manifolds coincide, profile is identically zero")
        return [SplittingPoint(theta=t, d=0.0, d_scaled=0.0, m_theta=m) for t, m in zip(thetas, m_theta)]

    m = strobe_map(sys, eps, 0.0, orbit=orbit)
    x_minus, _ = periodic_saddle(m, orbit.source.x)
    x_plus = x_minus if orbit.homoclinic else periodic_saddle(m, orbit.target.x)[0]
    unstable = manifold_seed(m, x_minus, "unstable")
    stable = manifold_seed(m, x_plus, "stable")
    logger.info(
        "Splitting at ε=%.3g: perturbed saddles %s / %s, ‖DH(x^h(0))‖=%.6f",
        eps, x_minus.tolist(), x_plus.tolist(), grad_norm,
    )

    def measure(theta: float) -> float:
        p_u = section_crossing(m, unstable, orbit, theta)
        p_s = section_crossing(m, stable, orbit, theta)
        return float((p_u - p_s) @ normal)

    tasks = [(f"theta={t:.4f}", lambda t=t: measure(t)) for t in thetas]
    distances = run_parallel(tasks, threads)
    return [
        SplittingPoint(theta=t, d=d, d_scaled=d * grad_norm / eps, m_theta=mt)
        for t, d, mt in zip(thetas, distances, m_theta)
    ]


def profile_error(points: Sequence[SplittingPoint]) -> float:
    """max_θ |d‖DH‖/ε − M(θ)|."""
    return max((p.abs_err for p in points), default=0.0)


def convergence_ratio(coarse: Sequence[SplittingPoint], fine: Sequence[SplittingPoint]) -> float:
    """Error reduction between two ε values; about 10 for a decade in ε."""
    fine_err = profile_error(fine)
    return profile_error(coarse) / fine_err if fine_err > 0 else float("inf")


def sign_changes(points: Sequence[SplittingPoint]) -> list[float]:
    """Midpoints (on the circle) of grid cells where d changes sign."""
    out = []
    k = len(points)
    for i in range(k):
        a, b = points[i], points[(i + 1) % k]
        if a.d == 0.0 or np.sign(a.d) != np.sign(b.d):
            hi = b.theta if i + 1 < k else b.theta + 2.0 * np.pi
            out.append(float((0.5 * (a.theta + hi)) % (2.0 * np.pi)))
    return out
