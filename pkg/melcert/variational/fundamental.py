"""Fundamental matrix X(t) = [φ, χφ + w] of the ξ-variational equation.

φ = J DH(x^h) is the separatrix velocity, w = (0, 1/D_{x2}H) and χ is a
primitive of D²_{x2}H / (D_{x2}H)², so det X = 1. χ has poles where
D_{x2}H(x^h(t)) vanishes; each branch (t > 0, t < 0) fixes its own
integration constant with χ = 0 at the point of the branch where
|D_{x2}H| is largest. With the x1/x2 roles exchanged, w = (1/D_{x1}H, 0)
and χ′ = D²_{x1}H / (D_{x1}H)².
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from melcert.errors import PoleCrossing
from melcert.models import Orbit
from melcert.separatrix.orbit import orbit_state
from melcert.variational.asymptotics import chi_rate

logger = logging.getLogger(__name__)

SCAN_POINTS = 400


def _reduction(orbit: Orbit, swapped: bool):
    """t ↦ the component of DH whose reciprocal enters w."""
    h1, h2 = orbit.system.grad
    poly = h1 if swapped else h2

    def value(t: float) -> float:
        x = orbit_state(orbit, t)
        return float(poly(x[0], x[1]))

    return value


def branch_reference(orbit: Orbit, branch: int, swapped: bool = False) -> float:
    """Point of the branch maximizing |D_{x2}H(x^h(t))|."""
    p = _reduction(orbit, swapped)
    span = max(orbit.t_orbit, 1.0)
    grid = orbit.shift + branch * np.linspace(1e-6, span, SCAN_POINTS)
    values = np.abs([p(t) for t in grid])
    k = int(np.argmax(values))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, SCAN_POINTS - 1)]
    if lo > hi:
        lo, hi = hi, lo
    res = minimize_scalar(lambda t: -abs(p(t)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    return float(res.x) if -res.fun >= values[k] else float(grid[k])


def _check_no_pole(p, t_ref: float, t: float) -> None:
    ts = np.linspace(t_ref, t, SCAN_POINTS)
    vals = np.array([p(s) for s in ts])
    if np.any(np.sign(vals) != np.sign(vals[0])) or np.any(vals == 0.0):
        raise PoleCrossing(f"D_x2 H vanishes between t = {t_ref:.6g} and t = {t:.6g}")


def chi_value(orbit: Orbit, t: float, branch: int, swapped: bool = False) -> float:
    p = _reduction(orbit, swapped)
    t_ref = branch_reference(orbit, branch, swapped)
    _check_no_pole(p, t_ref, t)
    value, _ = quad(chi_rate(orbit, swapped), t_ref, t, epsabs=1e-13, epsrel=1e-12, limit=400)
    return float(value)


def fundamental_X(orbit: Orbit, t: float, branch: int, swapped: bool = False) -> np.ndarray:
    """X(t) on the given branch; PoleCrossing if a zero of D_{x2}H separates t from the branch."""
    sys = orbit.system
    x = orbit_state(orbit, t)
    phi = sys.field(x)
    chi = chi_value(orbit, t, branch, swapped)
    p = _reduction(orbit, swapped)(t)
    w = np.array([1.0 / p, 0.0]) if swapped else np.array([0.0, 1.0 / p])
    return np.column_stack([phi, chi * phi + w])
