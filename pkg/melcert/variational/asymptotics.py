"""Limits of the separatrix velocity and of χ at the two saddles.

As t → ±∞ the velocity φ(t) = J DH(x^h(t)) decays like ξ± e^{∓λ± t} and
the primitive χ of D²_{x2}H / (D_{x2}H)² grows like χ± e^{±2λ± t}. Limits
are extrapolated to s = e^{−λ|t|} = 0 with a low-degree polynomial fit in s.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import quad

from melcert.errors import DegenerateHessian
from melcert.models import Orbit
from melcert.separatrix.orbit import orbit_state

logger = logging.getLogger(__name__)

S_GRID = np.geomspace(1e-2, 1e-4, 9)
FIT_DEGREE = 3
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class OrbitLimits:
    xi_plus: np.ndarray
    xi_minus: np.ndarray
    chi_plus: float
    chi_minus: float
    swapped: bool  # roles of x1 and x2 exchanged because D²_{x2}H vanishes at a saddle


def extrapolate(s: np.ndarray, values: np.ndarray, degree: int = FIT_DEGREE) -> np.ndarray:
    """Value at s = 0 of a least-squares polynomial fit, per column."""
    values = np.asarray(values)
    if values.ndim == 1:
        return Polynomial.fit(s, values, degree)(0.0)
    return np.array([Polynomial.fit(s, values[:, k], degree)(0.0) for k in range(values.shape[1])])


def _end(orbit: Orbit, side: int):
    return orbit.target if side > 0 else orbit.source


def _tail_times(orbit: Orbit, side: int) -> tuple[np.ndarray, float]:
    sad = _end(orbit, side)
    return orbit.shift + side * np.log(1.0 / S_GRID) / sad.lam, sad.lam


def velocity_limit(orbit: Orbit, side: int) -> np.ndarray:
    """ξ± = lim φ(t) e^{±λ± t}."""
    times, lam = _tail_times(orbit, side)
    sys = orbit.system
    samples = np.array(
        [sys.field(orbit_state(orbit, t)) * np.exp(side * lam * (t - orbit.shift)) for t in times]
    )
    return extrapolate(S_GRID, samples)


def _uses_swap(orbit: Orbit) -> bool:
    sys = orbit.system
    h22 = [sys.hessian_at(s.x)[1, 1] for s in (orbit.source, orbit.target)]
    if all(abs(v) > DEGENERATE_TOL for v in h22):
        return False
    h11 = [sys.hessian_at(s.x)[0, 0] for s in (orbit.source, orbit.target)]
    if all(abs(v) > DEGENERATE_TOL for v in h11):
        logger.info("D²_{x2}H vanishes at a saddle; exchanging the roles of x1 and x2")
        return True
    raise DegenerateHessian("D²_{x2}H and D²_{x1}H both vanish at a saddle")


def chi_limit(orbit: Orbit, side: int, xi: np.ndarray, swapped: bool = False) -> float:
    """χ± = ±D²H_kk(x±) / (2λ± ξ_k²), k the reduction coordinate."""
    sad = _end(orbit, side)
    hess = orbit.system.hessian_at(sad.x)
    # reduction uses D_{x2}H = φ1, or D_{x1}H = −φ2 when swapped
    h, comp = (hess[0, 0], xi[1]) if swapped else (hess[1, 1], xi[0])
    if abs(comp) < DEGENERATE_TOL:
        raise DegenerateHessian(f"velocity limit {xi.tolist()} has no component along the reduction coordinate")
    return float(side * h / (2.0 * sad.lam * comp**2))


def chi_rate(orbit: Orbit, swapped: bool = False):
    """t ↦ χ′(t) = D²_{x2}H / (D_{x2}H)² along the orbit (x1 version when swapped)."""
    sys = orbit.system
    (h11, _), (_, h22) = sys.hess
    h1, h2 = sys.grad

    def rate(t: float) -> float:
        x = orbit_state(orbit, t)
        if swapped:
            return float(h11(x[0], x[1]) / h1(x[0], x[1]) ** 2)
        return float(h22(x[0], x[1]) / h2(x[0], x[1]) ** 2)

    return rate


def chi_limit_numeric(orbit: Orbit, side: int, swapped: bool = False) -> float:
    """χ± from quadrature of χ′ on pole-free tail windows, extrapolated in s.

    On the window [t, t + h] (or [t − h, t] at −∞) the increment of χ divided
    by the increment of e^{±2λt} tends to χ±.
    """
    times, lam = _tail_times(orbit, side)
    rate = chi_rate(orbit, swapped)
    h = 1.0 / lam
    ratios = []
    for t in times:
        lo, hi = (t, t + h) if side > 0 else (t - h, t)
        increment, _ = quad(rate, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
        rel_lo, rel_hi = lo - orbit.shift, hi - orbit.shift
        growth = np.exp(2.0 * side * lam * rel_hi) - np.exp(2.0 * side * lam * rel_lo)
        ratios.append(increment / growth)
    return float(extrapolate(S_GRID, np.array(ratios)))


def orbit_asymptotics(orbit: Orbit) -> OrbitLimits:
    """ξ± by extrapolation, χ± in closed form."""
    swapped = _uses_swap(orbit)
    xi_plus = velocity_limit(orbit, 1)
    xi_minus = velocity_limit(orbit, -1)
    return OrbitLimits(
        xi_plus=xi_plus,
        xi_minus=xi_minus,
        chi_plus=chi_limit(orbit, 1, xi_plus, swapped),
        chi_minus=chi_limit(orbit, -1, xi_minus, swapped),
        swapped=swapped,
    )
