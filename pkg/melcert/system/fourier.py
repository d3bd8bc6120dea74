"""Finite Fourier series of the perturbation and the autonomous extension.

The perturbation is g(x, θ) = Σ_{|j|≤N} ĝ_j(x) e^{ijθ} with each ĝ_j a pair
of complex polynomials. Reality of g is the conjugate symmetry
ĝ_{-j} = conj(ĝ_j). The real form a_0, a_j, b_j drives the extended
system in which the forcing is carried by rotor variables (u_j, v_j).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Iterable

import numpy as np

from melcert.errors import RealityViolation, SchemaError
from melcert.system.polynomial import ZERO, Polynomial2

if TYPE_CHECKING:
    from melcert.models import ExtendedState, PlanarSystem

logger = logging.getLogger(__name__)

PolyPair = tuple[Polynomial2, Polynomial2]

REALITY_TOL = 1e-10


@dataclass(frozen=True)
class FourierVectorField:
    """ĝ_j for j = -N..N, stored at index j + N."""

    n: int
    coeff_hat: tuple[PolyPair, ...]

    @classmethod
    def zero(cls) -> FourierVectorField:
        return cls(0, ((ZERO, ZERO),))

    @classmethod
    def from_hat(cls, hat: dict[int, PolyPair], n: int | None = None) -> FourierVectorField:
        """Build from explicit complex coefficients; missing harmonics are zero.

        The cutoff is the larger of `n` and the highest harmonic present.
        """
        n = max([abs(j) for j in hat] + [n or 0])
        coeffs = tuple(hat.get(j, (ZERO, ZERO)) for j in range(-n, n + 1))
        return cls(n, coeffs)

    @classmethod
    def from_terms(cls, entries: Iterable[dict]) -> FourierVectorField:
        """Build from real `cos`/`sin` terms.

        Each entry is `{component: 1|2, harmonic: j>=0, phase: "cos"|"sin",
        poly: Polynomial2}` meaning poly(x) * cos(jθ) (or sin) added to the
        given component of g.
        """
        hat: dict[int, list[Polynomial2]] = {}
        n_decl = 0

        def _add(j: int, comp: int, p: Polynomial2) -> None:
            pair = hat.setdefault(j, [ZERO, ZERO])
            pair[comp] = pair[comp] + p

        for entry in entries:
            comp = int(entry["component"]) - 1
            j = int(entry["harmonic"])
            phase = entry["phase"]
            poly = entry["poly"]
            n_decl = max(n_decl, j)
            if comp not in (0, 1):
                raise SchemaError(f"component must be 1 or 2, got {entry['component']!r}")
            if j < 0:
                raise SchemaError(f"harmonic must be >= 0 for cos/sin terms, got {j}")
            if not poly.is_real():
                raise SchemaError("cos/sin terms take real polynomials")
            if phase == "cos":
                if j == 0:
                    _add(0, comp, poly)
                else:
                    _add(j, comp, poly.scale(0.5))
                    _add(-j, comp, poly.scale(0.5))
            elif phase == "sin":
                if j == 0:
                    raise SchemaError("sin phase needs harmonic >= 1")
                # p sin jθ = p (e^{ijθ} - e^{-ijθ}) / 2i
                _add(j, comp, poly.scale(-0.5j))
                _add(-j, comp, poly.scale(0.5j))
            else:
                raise SchemaError(f"phase must be 'cos' or 'sin', got {phase!r}")
        return cls.from_hat({j: (p[0], p[1]) for j, p in hat.items()}, n=n_decl)

    def hat(self, j: int) -> PolyPair:
        if abs(j) > self.n:
            return ZERO, ZERO
        return self.coeff_hat[j + self.n]

    def hat_at(self, j: int, x) -> np.ndarray:
        """ĝ_j(x) as a complex array of shape (2, ...)."""
        p1, p2 = self.hat(j)
        return np.array([p1(x[0], x[1]), p2(x[0], x[1])], dtype=complex)

    def evaluate(self, x, theta) -> np.ndarray:
        """Real g(x, θ); `theta` may be an array broadcast against x."""
        total = 0j * np.asarray(theta) + 0j * np.asarray(x[0])
        out = np.array([total, total], dtype=complex)
        for j in range(-self.n, self.n + 1):
            out = out + self.hat_at(j, x) * np.exp(1j * j * np.asarray(theta))
        return out.real

    @property
    def is_zero(self) -> bool:
        return all(p1.is_zero and p2.is_zero for p1, p2 in self.coeff_hat)

    def reality_defect(self) -> float:
        """Largest coefficient of ĝ_{-j} - conj(ĝ_j) over all j and both components."""
        worst = 0.0
        for j in range(0, self.n + 1):
            for comp in (0, 1):
                diff = self.hat(-j)[comp] - self.hat(j)[comp].conj()
                worst = max(worst, diff.max_abs_coeff())
        return worst

    def check_reality(self, tol: float = REALITY_TOL) -> None:
        defect = self.reality_defect()
        if defect > tol:
            raise RealityViolation(f"ĝ_-j differs from conj(ĝ_j) by {defect:.3e} (tol {tol:.1e})")

    def real_polys(self) -> tuple[PolyPair, list[PolyPair], list[PolyPair]]:
        """Polynomial real form (a_0, [a_j], [b_j]) for j = 1..N."""
        self.check_reality()
        a0 = tuple(p.real_part() for p in self.hat(0))
        a, b = [], []
        for j in range(1, self.n + 1):
            gp, gm = self.hat(j), self.hat(-j)
            a.append(tuple((gp[c] + gm[c]).real_part() for c in (0, 1)))
            b.append(tuple((gp[c] - gm[c]).scale(1j).real_part() for c in (0, 1)))
        return a0, a, b


def fourier_coefficients(g: Callable[[float], np.ndarray], n: int) -> np.ndarray:
    """ĝ_j for j = -n..n of a θ-periodic vector function, rows indexed by j + n.

    Trapezoidal rule on 2n + 2 equispaced nodes, exact for trigonometric
    polynomials of degree at most n.
    """
    k = 2 * n + 2
    theta = 2.0 * np.pi * np.arange(k) / k
    samples = np.array([np.asarray(g(t), dtype=complex) for t in theta])  # (k, 2)
    js = np.arange(-n, n + 1)
    kernel = np.exp(-1j * np.outer(js, theta)) / k  # (2n+1, k)
    return kernel @ samples


def real_form(coeffs: np.ndarray, tol: float = REALITY_TOL) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(a_0, a, b) from numeric coefficients laid out as in fourier_coefficients.

    a_j = ĝ_j + ĝ_{-j} and b_j = i(ĝ_j - ĝ_{-j}) for j = 1..N, rows j - 1.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    n = (coeffs.shape[0] - 1) // 2
    defect = 0.0
    for j in range(0, n + 1):
        defect = max(defect, float(np.max(np.abs(coeffs[n - j] - np.conj(coeffs[n + j])))))
    if defect > tol:
        raise RealityViolation(f"coefficients violate conjugate symmetry by {defect:.3e}")
    a0 = coeffs[n].real.copy()
    dim = coeffs.shape[1:]
    a = np.array([(coeffs[n + j] + coeffs[n - j]).real for j in range(1, n + 1)]).reshape((n, *dim))
    b = np.array([(1j * (coeffs[n + j] - coeffs[n - j])).real for j in range(1, n + 1)]).reshape((n, *dim))
    return a0, a, b


def extended_field(sys: PlanarSystem, s: ExtendedState) -> ExtendedState:
    """Right-hand side of the autonomous extension in (x, ε, u, v)."""
    from melcert.models import ExtendedState

    a0, a, b = sys.real_form
    x1, x2 = s.x
    xdot = np.asarray(sys.field(s.x), dtype=float)
    xdot = xdot + s.eps * np.array([a0[0](x1, x2), a0[1](x1, x2)], dtype=float)
    for j in range(1, sys.g.n + 1):
        aj, bj = a[j - 1], b[j - 1]
        xdot = xdot + s.u[j - 1] * np.array([aj[0](x1, x2), aj[1](x1, x2)], dtype=float)
        xdot = xdot + s.v[j - 1] * np.array([bj[0](x1, x2), bj[1](x1, x2)], dtype=float)
    js = np.arange(1, sys.g.n + 1)
    udot = -js * sys.omega * s.v
    vdot = js * sys.omega * s.u
    return ExtendedState(x=xdot, eps=0.0, u=udot, v=vdot)
