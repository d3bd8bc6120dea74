"""Zeros of the Melnikov function on the circle."""

from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import brentq

from melcert.config import settings
from melcert.errors import ConstantSeries, MultiHarmonic
from melcert.melnikov.coefficients import eval_melnikov, melnikov_derivative
from melcert.models import MelnikovSeries, ZeroPoint

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
DEDUP_TOL = 1e-9
ZERO_TOL = 1e-12  # relative to Σ|M̂_j|


def _is_constant(series: MelnikovSeries) -> bool:
    return all(abs(series.coeff(j)) <= series.error(j) for j in range(1, series.n + 1))


def _polish(series: MelnikovSeries, theta: float, steps: int = 3) -> float:
    for _ in range(steps):
        slope = melnikov_derivative(series, theta)
        if slope == 0.0:
            break
        step = eval_melnikov(series, theta) / slope
        theta -= step
        if abs(step) < 1e-16:
            break
    return theta


def _circle_gap(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def _wrap(theta: float) -> float:
    theta = float(theta % TWO_PI)
    return 0.0 if TWO_PI - theta < DEDUP_TOL else theta


def _scan(f, values: np.ndarray, grid: np.ndarray, tol: float) -> list[float]:
    """Roots of a 2π-periodic f from its values on the k nodes of grid[:-1].

    Nodes with |f| ≤ tol count as roots. Cells are scanned cyclically, so the
    cell [θ_{k−1}, 2π) closes on the value at θ = 0.
    """
    k = len(values)
    near = np.abs(values) <= tol
    roots: list[float] = []
    for i in range(k):
        nxt = (i + 1) % k
        if near[i]:
            roots.append(float(grid[i]))
        elif not near[nxt] and values[i] * values[nxt] < 0.0:
            roots.append(brentq(f, grid[i], grid[i + 1], xtol=1e-15))
    return roots


def simple_zeros(
    series: MelnikovSeries,
    tol_simple: float | None = None,
    oversample: int | None = None,
) -> list[ZeroPoint]:
    """All zeros of M on [0, 2π), each tagged simple iff |M′| > tol_simple.

    Sign changes on a uniform cyclic sample of max(256, oversample·N) points
    are bracketed with brentq and polished with Newton. Critical points of M
    where |M| is below the coefficient uncertainty are reported as
    degenerate (non-simple) zeros.
    """
    tol_simple = settings.tol_simple if tol_simple is None else tol_simple
    oversample = settings.zero_oversample if oversample is None else oversample
    if _is_constant(series):
        raise ConstantSeries("Melnikov function is constant; zeros are not isolated")

    k = max(256, oversample * series.n)
    grid = TWO_PI * np.arange(k + 1) / k
    js = np.arange(-series.n, series.n + 1)
    zero_tol = ZERO_TOL * float(np.sum(np.abs(series.coeffs)))
    crit_tol = max(zero_tol, float(np.sum(series.err)))

    def m(t):
        return eval_melnikov(series, t)

    def dm(t):
        return melnikov_derivative(series, t)

    # scalar evaluation so the bracket signs match what brentq recomputes
    values = np.array([m(t) for t in grid[:-1]])
    slopes = np.array([dm(t) for t in grid[:-1]])

    zeros: list[ZeroPoint] = []
    for theta in _scan(m, values, grid, zero_tol):
        polished = _polish(series, theta)
        if abs(m(polished)) <= abs(m(theta)):
            theta = polished
        theta = _wrap(theta)
        if any(_circle_gap(theta, z.theta) < DEDUP_TOL for z in zeros):
            continue
        slope = float(dm(theta))
        zeros.append(ZeroPoint(theta=theta, slope=slope, simple=abs(slope) > tol_simple))

    cell = TWO_PI / k
    d_tol = ZERO_TOL * float(np.sum(np.abs(js * series.coeffs)))
    for theta in _scan(dm, slopes, grid, d_tol):
        theta = _wrap(theta)
        if abs(m(theta)) > crit_tol or any(_circle_gap(theta, z.theta) < cell for z in zeros):
            continue
        slope = float(dm(theta))
        zeros.append(ZeroPoint(theta=theta, slope=slope, simple=abs(slope) > tol_simple))

    zeros.sort(key=lambda z: z.theta)
    logger.info("Found %d zeros of M (%d simple)", len(zeros), sum(z.simple for z in zeros))
    return zeros


def zero_existence_ratio(series: MelnikovSeries) -> float:
    """|M̂₀| / (2|M̂₁|) for single-harmonic series; zeros exist iff it is < 1."""
    for j in range(2, series.n + 1):
        if abs(series.coeff(j)) > series.error(j):
            raise MultiHarmonic(f"M̂_{j} = {series.coeff(j)!r} is nonzero; use simple_zeros")
    m0, m1 = abs(series.coeff(0)), abs(series.coeff(1))
    if m1 == 0.0:
        return float("inf")
    return m0 / (2.0 * m1)
