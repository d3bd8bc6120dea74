"""Melnikov coefficients M̂_j = ∫ DH(x^h(t))·ĝ_j(x^h(t)) e^{ijωt} dt.

The integrand decays like e^{−λ|t|} at both ends, so the integral is
taken adaptively on [τ − T_q, τ + T_q] (τ the orbit's time shift) and the
remainder is added from the exponential decay model fitted at ±T_q.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.integrate import quad_vec

from melcert.config import settings
from melcert.errors import SchemaError, ToleranceNotMet
from melcert.models import MelnikovSeries, Orbit, PlanarSystem
from melcert.parallel import run_parallel
from melcert.separatrix.orbit import orbit_state

logger = logging.getLogger(__name__)

T_Q_CAP = 400.0  # in units of 1/λ_min


def _profile(orbit: Orbit, sys: PlanarSystem, j: int):
    """t ↦ DH(x^h(t))·ĝ_j(x^h(t)), without the oscillating factor."""
    p1, p2 = sys.g.hat(j)
    h1, h2 = sys.grad

    def f(t):
        x = orbit_state(orbit, t)
        return complex(h1(x[0], x[1]) * p1(x[0], x[1]) + h2(x[0], x[1]) * p2(x[0], x[1]))

    return f


def _truncation(f, center: float, lam: float, tol: float) -> float:
    """Half-width T_q: at least 20/λ, grown until the tails are below tol/10."""
    T = 20.0 / lam
    while max(abs(f(center + T)), abs(f(center - T))) / lam >= tol / 10.0:
        if T * lam > T_Q_CAP:
            break
        T *= 1.25
    return T


def _tail(f, edge: float, direction: int, lam: float, phase: float) -> complex:
    """∫ from edge to ±∞ of f(edge) e^{−κ|t − edge|} e^{iφt}, κ measured from f."""
    f_edge = f(edge)
    if f_edge == 0:
        return 0j
    f_in = f(edge - direction / lam)
    kappa = lam
    if f_in != 0:
        measured = np.log(abs(f_in) / abs(f_edge)) * lam
        if np.isfinite(measured):
            kappa = max(measured, lam)
    return f_edge * np.exp(1j * phase * edge) / (kappa - direction * 1j * phase)


def melnikov_coefficient(
    orbit: Orbit,
    sys: PlanarSystem,
    j: int,
    tol: float | None = None,
) -> tuple[complex, float]:
    """M̂_j and an error bound (quadrature estimate plus tail magnitude)."""
    tol = settings.tol_coeff if tol is None else tol
    if abs(j) > sys.g.n:
        raise SchemaError(f"harmonic {j} beyond the cutoff N = {sys.g.n}")
    p1, p2 = sys.g.hat(j)
    if p1.is_zero and p2.is_zero:
        return 0j, 0.0

    f = _profile(orbit, sys, j)
    lam = min(orbit.source.lam, orbit.target.lam)
    phase = j * sys.omega
    center = orbit.shift
    T = _truncation(f, center, lam, tol)
    a, b = center - T, center + T

    points = [center]
    if orbit.kind == "numeric":
        points += [center + orbit.t_min, center + orbit.t_max]
    points = sorted(p for p in points if a < p < b)

    def integrand(t):
        v = f(t) * np.exp(1j * phase * t)
        return np.array([v.real, v.imag])

    res, q_err = quad_vec(integrand, a, b, epsabs=tol / 4.0, epsrel=1e-13, norm="max", points=points or None, limit=2000)
    tail_lo = _tail(f, a, -1, lam, phase)
    tail_hi = _tail(f, b, 1, lam, phase)
    value = complex(res[0], res[1]) + tail_lo + tail_hi
    err = float(np.sqrt(2.0) * q_err + abs(tail_lo) + abs(tail_hi))
    logger.debug("M̂_%d = %r (T_q = %.3f, err %.2e)", j, value, T, err)
    if err > tol:
        raise ToleranceNotMet(f"M̂_{j}: error {err:.3e} exceeds tol {tol:.1e} (T_q = {T:.2f})")
    return value, err


def melnikov_series(
    orbit: Orbit,
    sys: PlanarSystem,
    tol: float | None = None,
    threads: int | None = None,
) -> MelnikovSeries:
    """All M̂_j, j = −N..N, computed concurrently and made conjugate-symmetric."""
    tol = settings.tol_coeff if tol is None else tol
    n = sys.g.n
    tasks = [(f"M_{j}", lambda j=j: melnikov_coefficient(orbit, sys, j, tol)) for j in range(-n, n + 1)]
    results = run_parallel(tasks, threads)
    raw = np.array([c for c, _ in results], dtype=complex)
    err = np.array([e for _, e in results], dtype=float)

    mirrored = np.conj(raw[::-1])
    asym = float(np.max(np.abs(raw - mirrored)))
    if asym > 10.0 * tol:
        logger.warning("Melnikov coefficients asymmetric by %.3e (tol %.1e); symmetrizing", asym, tol)
    coeffs = 0.5 * (raw + mirrored)
    coeffs[n] = coeffs[n].real
    err = np.maximum(err, err[::-1])
    return MelnikovSeries(n=n, coeffs=coeffs, err=err, omega=sys.omega, orbit_id=orbit.orbit_id, convention=orbit.convention)


def eval_melnikov(series: MelnikovSeries, theta) -> np.ndarray | float:
    """M(θ) = Σ M̂_j e^{ijθ}."""
    theta = np.asarray(theta, dtype=float)
    js = np.arange(-series.n, series.n + 1)
    values = np.tensordot(series.coeffs, np.exp(1j * np.multiply.outer(js, theta)), axes=1)
    return values.real if values.ndim else float(values.real)


def melnikov_derivative(series: MelnikovSeries, theta) -> np.ndarray | float:
    """M′(θ) = Σ ij M̂_j e^{ijθ}."""
    theta = np.asarray(theta, dtype=float)
    js = np.arange(-series.n, series.n + 1)
    values = np.tensordot(1j * js * series.coeffs, np.exp(1j * np.multiply.outer(js, theta)), axes=1)
    return values.real if values.ndim else float(values.real)


def melnikov_imag_residue(series: MelnikovSeries, theta) -> float:
    """Largest |Im Σ M̂_j e^{ijθ}| over the given θ."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    js = np.arange(-series.n, series.n + 1)
    values = series.coeffs @ np.exp(1j * np.outer(js, theta))
    return float(np.max(np.abs(values.imag)))
