"""Connection matrices B± and B₀ = B₊⁻¹B₋ of the ξ-variational equation.

The global frame is X̃ = [φ, ψ̃]: φ the separatrix velocity and ψ̃ the
solution with ψ̃(0) = −Jφ(0)/|φ(0)|², so det X̃ = 1 and ψ̃ has no poles.
ψ̃ grows at both ends; it is integrated as w = e^{∓λ± t} ψ̃, which tends to
ρ± times the growing eigenvector. With ξ± = κ± (decaying eigenvector),

    X̃(t) B± e^{−A± t} → id,   B± = [[g±, 1/κ±], [1/ρ±, 0]] Q±⁻¹,

where Q₊ = [v_u⁺, v_s⁺], Q₋ = [v_s⁻, v_u⁻] and g± is the free gauge.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from melcert.config import settings
from melcert.errors import IllConditioned, StepFailure
from melcert.models import Orbit
from melcert.separatrix.orbit import orbit_state
from melcert.variational.asymptotics import OrbitLimits, extrapolate, orbit_asymptotics

logger = logging.getLogger(__name__)

J = np.array([[0.0, 1.0], [-1.0, 0.0]])
COND_MAX = 1e12
FIT_POINTS = 9


@dataclass(frozen=True, eq=False)
class ConnectionData:
    B_plus: np.ndarray
    B_minus: np.ndarray
    B0: np.ndarray
    Q_plus: np.ndarray
    Q_minus: np.ndarray
    kappa_plus: float
    kappa_minus: float
    rho_plus: float
    rho_minus: float
    residual_plus: float
    residual_minus: float
    t_match: float
    gauge: tuple[complex, complex]


def eigenbases(orbit: Orbit) -> tuple[np.ndarray, np.ndarray]:
    """(Q₊, Q₋) with the decaying direction in the second column."""
    q_plus = np.column_stack([orbit.target.v_u, orbit.target.v_s])
    q_minus = np.column_stack([orbit.source.v_s, orbit.source.v_u])
    return q_plus, q_minus


def _frame_core(g: complex, kappa: float, rho: float) -> np.ndarray:
    return np.array([[g, 1.0 / kappa], [1.0 / rho, 0.0]], dtype=complex)


def gauge_matrix(g: complex, q: np.ndarray) -> np.ndarray:
    """Change of B± under g± → g± + g."""
    return np.array([[g, 0.0], [0.0, 0.0]], dtype=complex) @ np.linalg.inv(q)


def _complement_run(orbit: Orbit, side: int, t_end: float, rtol: float, atol: float):
    """w(t) = e^{∓λt} ψ̃(t) on [0, ±t_end] (time relative to the orbit shift)."""
    sys = orbit.system
    lam = (orbit.target if side > 0 else orbit.source).lam
    x0 = orbit_state(orbit, orbit.shift)
    phi0 = sys.field(x0)
    n0 = -J @ phi0 / float(phi0 @ phi0)

    def rhs(t, w):
        a = sys.jacobian_at(orbit_state(orbit, orbit.shift + t))
        return (a - side * lam * np.eye(2)) @ w

    sol = solve_ivp(rhs, (0.0, side * t_end), n0, method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise StepFailure(f"complement solution failed on side {side:+d}: {sol.message}")
    return sol, lam


def connection_matrices(
    orbit: Orbit,
    limits: OrbitLimits | None = None,
    gauge: tuple[complex, complex] = (0.0, 0.0),
    t_match: float | None = None,
) -> ConnectionData:
    """B₊, B₋, B₀ with matching residuals at ±T_match; gauge = (g₋, g₊)."""
    limits = orbit_asymptotics(orbit) if limits is None else limits
    lam_min = min(orbit.source.lam, orbit.target.lam)
    if t_match is None:
        t_match = float(np.log(1.0 / settings.match_decay) / lam_min)
    q_plus, q_minus = eigenbases(orbit)
    sys = orbit.system

    out = {}
    for side, q, xi, g in ((1, q_plus, limits.xi_plus, gauge[1]), (-1, q_minus, limits.xi_minus, gauge[0])):
        sol, lam = _complement_run(orbit, side, t_match, settings.ode_rtol, settings.ode_atol)
        q_inv = np.linalg.inv(q)
        kappa = float((q_inv @ xi)[1])
        s = np.geomspace(1e-3, np.exp(-lam * t_match), FIT_POINTS)
        ts = side * np.log(1.0 / s) / lam
        coeffs = np.array([(q_inv @ sol.sol(t))[0] for t in ts])
        rho = float(extrapolate(s, coeffs))
        core = _frame_core(g, kappa, rho)
        B = core @ q_inv

        # X̃(T) B e^{−A T} − id, assembled column-wise from rescaled quantities
        t_end = side * t_match
        phi = sys.field(orbit_state(orbit, orbit.shift + t_end))
        w_end = sol.sol(t_end)
        scaled = np.column_stack([g * phi * np.exp(-side * lam * t_end) + w_end / rho, phi * np.exp(side * lam * t_end) / kappa])
        residual = float(np.linalg.norm(scaled @ q_inv - np.eye(2)))
        out[side] = (B, kappa, rho, residual)

    B_plus, kappa_plus, rho_plus, res_plus = out[1]
    B_minus, kappa_minus, rho_minus, res_minus = out[-1]
    B0 = np.linalg.solve(B_plus, B_minus)
    cond = float(np.linalg.cond(B0))
    if not np.isfinite(cond) or cond > COND_MAX:
        raise IllConditioned(f"cond(B0) = {cond:.3e} exceeds {COND_MAX:.0e}")
    logger.info(
        "Connection: T_match=%.3f, residuals %.2e / %.2e, cond(B0)=%.3e", t_match, res_minus, res_plus, cond
    )
    return ConnectionData(
        B_plus=B_plus,
        B_minus=B_minus,
        B0=B0,
        Q_plus=q_plus,
        Q_minus=q_minus,
        kappa_plus=kappa_plus,
        kappa_minus=kappa_minus,
        rho_plus=rho_plus,
        rho_minus=rho_minus,
        residual_plus=res_plus,
        residual_minus=res_minus,
        t_match=t_match,
        gauge=(complex(gauge[0]), complex(gauge[1])),
    )


def wronskian_check(data: ConnectionData) -> float:
    """max |κ±ρ± det Q± + 1|, zero for exact data since det X̃ = 1."""
    return max(
        abs(data.kappa_plus * data.rho_plus * np.linalg.det(data.Q_plus) + 1.0),
        abs(data.kappa_minus * data.rho_minus * np.linalg.det(data.Q_minus) + 1.0),
    )
