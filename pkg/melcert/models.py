from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable

import numpy as np

from melcert.system.fourier import FourierVectorField
from melcert.system.polynomial import Polynomial2


@dataclass(frozen=True)
class PlanarSystem:
    """ẋ = J DH(x) + ε g(x, ωt + θ) with g a finite Fourier series in θ."""

    H: Polynomial2
    g: FourierVectorField
    omega: float
    name: str = "custom"
    params: dict[str, float] = field(default_factory=dict, compare=False)
    saddle_guesses: tuple[tuple[float, float], ...] = field(default=(), compare=False)  # (source, target)
    preset: str | None = field(default=None, compare=False)  # set only by build_preset

    @cached_property
    def grad(self) -> tuple[Polynomial2, Polynomial2]:
        return self.H.gradient()

    @cached_property
    def hess(self) -> tuple[tuple[Polynomial2, Polynomial2], tuple[Polynomial2, Polynomial2]]:
        return self.H.hessian()

    @cached_property
    def real_form(self):
        return self.g.real_polys()

    def energy(self, x):
        return self.H(x[0], x[1])

    def gradient_at(self, x) -> np.ndarray:
        """DH(x)."""
        h1, h2 = self.grad
        return np.array([h1(x[0], x[1]), h2(x[0], x[1])])

    def field(self, x) -> np.ndarray:
        """J DH(x) = (D_{x2}H, -D_{x1}H)."""
        h1, h2 = self.grad
        return np.array([h2(x[0], x[1]), -h1(x[0], x[1])])

    def hessian_at(self, x) -> np.ndarray:
        (h11, h12), (_, h22) = self.hess
        a, b, c = h11(x[0], x[1]), h12(x[0], x[1]), h22(x[0], x[1])
        return np.array([[a, b], [b, c]])

    def jacobian_at(self, x) -> np.ndarray:
        """J D²H(x), the linearization of the Hamiltonian field."""
        (h11, h12), (_, h22) = self.hess
        a, b, c = h11(x[0], x[1]), h12(x[0], x[1]), h22(x[0], x[1])
        return np.array([[b, c], [-a, -b]])

    def perturbed_field(self, x, theta, eps: float) -> np.ndarray:
        return self.field(x) + eps * self.g.evaluate(x, theta)


@dataclass(frozen=True, eq=False)
class ExtendedState:
    x: np.ndarray
    eps: float
    u: np.ndarray
    v: np.ndarray

    def to_vector(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.x, dtype=float), [self.eps], self.u, self.v])

    @classmethod
    def from_vector(cls, y: np.ndarray, n: int) -> ExtendedState:
        return cls(x=y[:2], eps=float(y[2]), u=y[3 : 3 + n], v=y[3 + n : 3 + 2 * n])


@dataclass(frozen=True, eq=False)
class Saddle:
    x: np.ndarray
    lam: float
    v_u: np.ndarray
    v_s: np.ndarray
    hessian: np.ndarray

    @property
    def q_matrix(self) -> np.ndarray:
        """Columns (v_u, v_s)."""
        return np.column_stack([self.v_u, self.v_s])


@dataclass(frozen=True, eq=False)
class Orbit:
    """Homo- or heteroclinic solution x^h(t) from `source` to `target`.

    Closed-form orbits carry a preset id and branch; numeric orbits carry
    the dense solution of the shooting run (`dense`, in solver time) and the
    offset mapping orbit time to solver time.
    """

    source: Saddle
    target: Saddle
    energy: float
    kind: str  # "closed_form" | "numeric"
    system: PlanarSystem = field(repr=False)
    preset: str | None = None
    branch: int = 1
    dense: Callable | None = field(default=None, repr=False)
    t_offset: float = 0.0
    t_min: float = 0.0  # orbit-time span covered by `dense`
    t_max: float = 0.0
    t_orbit: float = 0.0
    t_grid: np.ndarray | None = field(default=None, repr=False)
    shift: float = 0.0
    convention: str = "max-distance-origin"

    @property
    def homoclinic(self) -> bool:
        return bool(np.allclose(self.source.x, self.target.x))

    @property
    def orbit_id(self) -> str:
        if self.kind == "closed_form":
            return f"{self.preset}:{'+' if self.branch > 0 else '-'}"
        return f"numeric:{self.system.name}"


@dataclass(frozen=True, eq=False)
class OrbitPoint:
    x: np.ndarray
    xdot: np.ndarray


@dataclass
class MelnikovSeries:
    n: int
    coeffs: np.ndarray  # complex, index j + n
    err: np.ndarray
    omega: float
    orbit_id: str
    convention: str = "max-distance-origin"

    def coeff(self, j: int) -> complex:
        if abs(j) > self.n:
            return 0j
        return complex(self.coeffs[j + self.n])

    def error(self, j: int) -> float:
        if abs(j) > self.n:
            return 0.0
        return float(self.err[j + self.n])


@dataclass
class Certificate:
    verdict: str  # "NonIntegrable" | "Inconclusive"
    witness: int | None
    margin: float
    series: MelnikovSeries | None = field(default=None, repr=False)


@dataclass(frozen=True)
class ZeroPoint:
    theta: float
    slope: float
    simple: bool


@dataclass
class AsymptoticData:
    ell: int
    lam_plus: float
    lam_minus: float
    xi_plus: np.ndarray
    xi_minus: np.ndarray
    chi_plus: float
    chi_minus: float
    m_plus: complex
    m_minus: complex
    c_plus: np.ndarray
    c_minus: np.ndarray
    b_plus: np.ndarray
    b_minus: np.ndarray
    B_plus: np.ndarray
    B_minus: np.ndarray
    B0: np.ndarray
    Q_plus: np.ndarray
    Q_minus: np.ndarray
    swapped: bool = False


@dataclass
class MonodromyPair:
    ell: int
    lam_plus: float
    lam_minus: float
    M_plus: np.ndarray
    M_minus: np.ndarray
    commutator_norm: float
    verdict: str | None = None


@dataclass(frozen=True)
class StrobeMap:
    system: PlanarSystem
    eps: float
    theta0: float = 0.0
    rtol: float = 1e-12
    atol: float = 1e-14
    box: float = np.inf


@dataclass
class ManifoldTrace:
    anchor: np.ndarray
    side: str  # "stable" | "unstable"
    points: np.ndarray  # (n, 2)
    arclength: np.ndarray
    spacing_max: float


@dataclass(frozen=True)
class SplittingPoint:
    theta: float
    d: float
    d_scaled: float
    m_theta: float

    @property
    def abs_err(self) -> float:
        return abs(self.d_scaled - self.m_theta)


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    preset: str | None = None
    params: dict[str, float] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    out_dir: str = "output"
    fmt: str = "json"
    threads: int = 0
    sweep: dict[str, list[float]] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)
