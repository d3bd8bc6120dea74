"""Monodromy pair M± around the two saddles and the commutator obstruction.

In the frame of the asymptotic solutions, the loop around x₋ gives

    M₋ = [[id, (e₋ − 1) c₋], [0, e₋]],                 e₋ = e^{−2πℓω/λ₋},
    M₊ = [[id, (e₊ − 1)(B₀⁻¹(b₊ + c₊) − b₋)], [0, e₊]],  e₊ = e^{2πℓω/λ₊},

with b± = −m±(χ± ξ± + (0, 1/ξ±₁)) − c± and m₋ = 0, m₊ = M̂_ℓ. Their
commutator has top-right block (e₊ − 1)(e₋ − 1)(B₀⁻¹(b₊ + c₊) − b₋ − c₋),
which vanishes exactly when M̂_ℓ does.
"""

from __future__ import annotations

import logging

import numpy as np

from melcert.config import settings
from melcert.melnikov.certificate import INCONCLUSIVE, NON_INTEGRABLE
from melcert.melnikov.coefficients import melnikov_coefficient
from melcert.models import AsymptoticData, MonodromyPair, Orbit, PlanarSystem, Saddle
from melcert.variational.asymptotics import OrbitLimits, orbit_asymptotics
from melcert.variational.connection import connection_matrices

logger = logging.getLogger(__name__)


def c_vectors(
    saddles: tuple[Saddle, Saddle],
    sys: PlanarSystem,
    ell: int,
    omega: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """c± = −(J D²H(x±) + iℓω) ĝ_ℓ(x±) / (λ±² + ℓ²ω²); saddles = (x₊, x₋)."""
    omega = sys.omega if omega is None else omega
    out = []
    for sad in saddles:
        a = sys.jacobian_at(sad.x) + 1j * ell * omega * np.eye(2)
        out.append(-(a @ sys.g.hat_at(ell, sad.x)) / (sad.lam**2 + (ell * omega) ** 2))
    return out[0], out[1]


def m_values(orbit: Orbit, sys: PlanarSystem, ell: int, tol: float | None = None) -> tuple[complex, complex]:
    """(m₋, m₊) = (0, M̂_ℓ)."""
    value, _ = melnikov_coefficient(orbit, sys, ell, tol)
    return 0j, value


def growth_vector(limits: OrbitLimits, side: int) -> np.ndarray:
    """χ±ξ± + (0, 1/ξ±₁), or χ±ξ± + (−1/ξ±₂, 0) with x1/x2 exchanged."""
    xi = limits.xi_plus if side > 0 else limits.xi_minus
    chi = limits.chi_plus if side > 0 else limits.chi_minus
    tail = np.array([-1.0 / xi[1], 0.0]) if limits.swapped else np.array([0.0, 1.0 / xi[0]])
    return chi * xi + tail


def b_vectors(limits: OrbitLimits, m: tuple[complex, complex], c: tuple[np.ndarray, np.ndarray]):
    """(b₊, b₋) from m = (m₋, m₊) and c = (c₊, c₋)."""
    b_plus = -m[1] * growth_vector(limits, 1) - c[0]
    b_minus = -m[0] * growth_vector(limits, -1) - c[1]
    return b_plus, b_minus


def asymptotic_data(
    orbit: Orbit,
    sys: PlanarSystem,
    ell: int,
    gauge: tuple[complex, complex] = (0.0, 0.0),
    t_match: float | None = None,
    m_plus: complex | None = None,
) -> AsymptoticData:
    """Everything the monodromy pair needs; `m_plus` overrides the quadrature."""
    limits = orbit_asymptotics(orbit)
    conn = connection_matrices(orbit, limits, gauge=gauge, t_match=t_match)
    c_plus, c_minus = c_vectors((orbit.target, orbit.source), sys, ell)
    m_minus, m_quad = m_values(orbit, sys, ell) if m_plus is None else (0j, m_plus)
    b_plus, b_minus = b_vectors(limits, (m_minus, m_quad), (c_plus, c_minus))
    return AsymptoticData(
        ell=ell,
        lam_plus=orbit.target.lam,
        lam_minus=orbit.source.lam,
        xi_plus=limits.xi_plus,
        xi_minus=limits.xi_minus,
        chi_plus=limits.chi_plus,
        chi_minus=limits.chi_minus,
        m_plus=complex(m_quad),
        m_minus=complex(m_minus),
        c_plus=c_plus,
        c_minus=c_minus,
        b_plus=b_plus,
        b_minus=b_minus,
        B_plus=conn.B_plus,
        B_minus=conn.B_minus,
        B0=conn.B0,
        Q_plus=conn.Q_plus,
        Q_minus=conn.Q_minus,
        swapped=limits.swapped,
    )


def _block(upper: np.ndarray, corner: complex) -> np.ndarray:
    m = np.eye(3, dtype=complex)
    m[:2, 2] = upper
    m[2, 2] = corner
    return m


def monodromy_pair(data: AsymptoticData, omega: float) -> MonodromyPair:
    e_minus = np.exp(-2.0 * np.pi * data.ell * omega / data.lam_minus)
    e_plus = np.exp(2.0 * np.pi * data.ell * omega / data.lam_plus)
    M_minus = _block((e_minus - 1.0) * data.c_minus, e_minus)
    w = np.linalg.solve(data.B0, data.b_plus + data.c_plus) - data.b_minus
    M_plus = _block((e_plus - 1.0) * w, e_plus)
    commutator = M_plus @ M_minus - M_minus @ M_plus
    norm = float(np.linalg.norm(commutator))
    logger.info("Monodromy pair for ell=%d: commutator norm %.6e", data.ell, norm)
    return MonodromyPair(
        ell=data.ell,
        lam_plus=data.lam_plus,
        lam_minus=data.lam_minus,
        M_plus=M_plus,
        M_minus=M_minus,
        commutator_norm=norm,
    )


def commutator_certificate(pair: MonodromyPair, tol: float | None = None) -> str:
    """NonIntegrable iff the pair fails to commute by more than tol."""
    tol = settings.tol_commutator if tol is None else tol
    verdict = NON_INTEGRABLE if pair.commutator_norm > tol else INCONCLUSIVE
    pair.verdict = verdict
    return verdict
