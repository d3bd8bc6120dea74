"""Monodromy by continuing the variational equation in complex time.

Near a saddle the separatrix is a function of z = e^{λt}, so a loop around
z = 0 is the vertical segment t₀ → t₀ ± 2πi/λ. Along it the 3-dimensional
system

    ξ′ = J D²H(x^h(t)) ξ + ĝ_ℓ(x^h(t)) η,   η′ = iℓω η

is integrated in the frame Φ(t) = [[e^{A t}, c e^{iℓωt}], [0, e^{iℓωt}]]
of the constant-coefficient system at the saddle, writing the solution as
Φ(t) Z(t). Only the deviation of the coefficients from their saddle values
drives Z, which keeps the large and small exponentials out of the state.
The phase e^{iℓωt} is carried along the path as an extra state, and the
result is conjugated by [[id, −c], [0, 1]] into the frame of the asymptotic
solutions, where the closed form reads [[id, (e − 1)c], [0, e]].

The ξ-block S of the continued matrix is unipotent but need not be the
identity: a logarithmic term in the homogeneous solutions (duffing1 has one)
shears it. In that frame the inhomogeneous column is then (e·id − S)c, which
reduces to the closed form when S = id; `closed_form_gap` measures the
distance to it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from melcert.config import settings
from melcert.errors import NotClosedForm, PoleOnPath, StepFailure
from melcert.models import Orbit, PlanarSystem
from melcert.separatrix.orbit import orbit_state
from melcert.variational.monodromy import c_vectors

logger = logging.getLogger(__name__)

POLE_RADIUS = 1e6


@dataclass(frozen=True, eq=False)
class ContinuationResult:
    side: int
    ell: int
    t0: float
    matrix: np.ndarray  # in the asymptotic-solution frame
    c: np.ndarray
    shear: float  # ‖ξ-block − id‖

    @property
    def corner(self) -> complex:
        return complex(self.matrix[2, 2])

    @property
    def expected_column(self) -> np.ndarray:
        """(e·id − S)c, the inhomogeneous column implied by the continued ξ-block S."""
        return (self.corner * np.eye(2) - self.matrix[:2, :2]) @ self.c

    @property
    def closed_form_gap(self) -> float:
        return float(np.linalg.norm(self.matrix[:2, 2] - self.expected_column))


def _expm(q: np.ndarray, q_inv: np.ndarray, lam: float, t: complex) -> np.ndarray:
    """e^{A t} with A = Q diag(λ, −λ) Q⁻¹."""
    return q @ np.diag([np.exp(lam * t), np.exp(-lam * t)]) @ q_inv


def to_asymptotic_frame(matrix: np.ndarray, c: np.ndarray) -> np.ndarray:
    """N⁻¹ M N with N = [[id, −c], [0, 1]]."""
    n = np.eye(3, dtype=complex)
    n[:2, 2] = -c
    n_inv = np.eye(3, dtype=complex)
    n_inv[:2, 2] = c
    return n_inv @ matrix @ n


def monodromy_via_continuation(
    sys: PlanarSystem,
    orbit: Orbit,
    ell: int,
    side: int,
    t0: float | None = None,
    rtol: float = 1e-12,
    atol: float = 1e-14,
) -> ContinuationResult:
    """Monodromy representative around x₋ (side −1) or x₊ (side +1).

    Side − runs t₀ → t₀ + 2πi/λ₋ from Re t₀ < 0, side + runs
    t₀ → t₀ − 2πi/λ₊ from Re t₀ > 0, so the corners come out as
    e^{−2πℓω/λ₋} and e^{2πℓω/λ₊}.
    """
    if orbit.kind != "closed_form":
        raise NotClosedForm("complex-time continuation needs a closed-form separatrix")
    sad = orbit.target if side > 0 else orbit.source
    t0 = side * settings.continuation_t0 if t0 is None else float(t0)
    lam, omega = sad.lam, sys.omega
    q = np.column_stack([sad.v_u, sad.v_s])
    q_inv = np.linalg.inv(q)
    a_sad = sys.jacobian_at(sad.x)
    g_sad = sys.g.hat_at(ell, sad.x)
    c_plus, c_minus = c_vectors((orbit.target, orbit.source), sys, ell)
    c = c_plus if side > 0 else c_minus
    direction = 1j if side < 0 else -1j
    period = 2.0 * np.pi / lam

    def rhs(s, state):
        t = t0 + direction * s
        x = orbit_state(orbit, t + orbit.shift)
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > POLE_RADIUS:
            raise PoleOnPath(f"separatrix singular near t = {t:.6g}")
        e = _expm(q, q_inv, lam, t)
        e_inv = _expm(q, q_inv, lam, -t)
        d_a = sys.jacobian_at(x) - a_sad
        d_g = sys.g.hat_at(ell, x) - g_sad
        gen = np.zeros((3, 3), dtype=complex)
        gen[:2, :2] = e_inv @ d_a @ e
        gen[:2, 2] = e_inv @ (d_a @ c + d_g) * np.exp(1j * ell * omega * t)
        z = state[:9].reshape(3, 3)
        # relative phase of η along the path
        dphase = 1j * ell * omega * state[9]
        return np.append((gen @ z).ravel(), dphase) * direction

    start = np.append(np.eye(3, dtype=complex).ravel(), 1.0 + 0j)
    sol = solve_ivp(rhs, (0.0, period), start, method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise StepFailure(f"continuation around side {side:+d} failed: {sol.message}")
    z_end = sol.y[:9, -1].reshape(3, 3)
    corner = sol.y[9, -1]
    loop = np.diag([1.0, 1.0, corner]).astype(complex)
    matrix = to_asymptotic_frame(loop @ z_end, c)
    shear = float(np.linalg.norm(matrix[:2, :2] - np.eye(2)))
    result = ContinuationResult(side=side, ell=ell, t0=t0, matrix=matrix, c=c, shear=shear)
    logger.info(
        "Continuation side %+d (t0=%.2f): corner %.6e, shear %.3e, closed-form gap %.3e",
        side,
        t0,
        abs(corner),
        shear,
        result.closed_form_gap,
    )
    return result
