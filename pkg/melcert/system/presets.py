"""Built-in Duffing systems.

duffing1: ẍ = x − x³ + ε(β cos ωt − δẋ), homoclinic to the origin.
duffing2: ẍ = −x + x³ + ε(β cos ωt − δẋ), heteroclinic between (±1, 0).

Both share the perturbation g = (0, β cos θ − δ x₂).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from melcert.errors import SchemaError, UnknownPreset
from melcert.models import PlanarSystem
from melcert.system.fourier import FourierVectorField
from melcert.system.polynomial import Polynomial2

DEFAULT_PARAMS = {"beta": 1.0, "delta": 0.0, "omega": 1.0}


@dataclass(frozen=True)
class PresetSpec:
    name: str
    hamiltonian: list[list[float]]
    saddle_guesses: tuple[tuple[float, float], tuple[float, float]]  # (source, target) for branch +
    energy: float
    description: str


PRESETS: dict[str, PresetSpec] = {
    "duffing1": PresetSpec(
        name="duffing1",
        hamiltonian=[[0, 2, 0.5], [2, 0, -0.5], [4, 0, 0.25]],
        saddle_guesses=((0.0, 0.0), (0.0, 0.0)),
        energy=0.0,
        description="double-well Duffing, homoclinic loops around (±1, 0)",
    ),
    "duffing2": PresetSpec(
        name="duffing2",
        hamiltonian=[[0, 2, 0.5], [2, 0, 0.5], [4, 0, -0.25]],
        saddle_guesses=((-1.0, 0.0), (1.0, 0.0)),
        energy=0.25,
        description="softening Duffing, heteroclinic cycle between (±1, 0)",
    ),
}


def get_preset(name: str) -> PresetSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def preset_perturbation(beta: float, delta: float) -> FourierVectorField:
    """g = (0, β cos θ − δ x₂)."""
    return FourierVectorField.from_terms(
        [
            {"component": 2, "harmonic": 1, "phase": "cos", "poly": Polynomial2.from_monomials([[0, 0, beta]])},
            {"component": 2, "harmonic": 0, "phase": "cos", "poly": Polynomial2.from_monomials([[0, 1, -delta]])},
        ]
    )


def build_preset(name: str, beta: float | None = None, delta: float | None = None, omega: float | None = None) -> PlanarSystem:
    spec = get_preset(name)
    params = {
        "beta": DEFAULT_PARAMS["beta"] if beta is None else float(beta),
        "delta": DEFAULT_PARAMS["delta"] if delta is None else float(delta),
        "omega": DEFAULT_PARAMS["omega"] if omega is None else float(omega),
    }
    if not params["omega"] > 0.0:
        raise SchemaError(f"omega must be positive, got {params['omega']}")
    return PlanarSystem(
        H=Polynomial2.from_monomials(spec.hamiltonian),
        g=preset_perturbation(params["beta"], params["delta"]),
        omega=params["omega"],
        name=name,
        params=params,
        saddle_guesses=spec.saddle_guesses,
        preset=name,
    )


def threshold_ratio(name: str, omega: float) -> dict[str, float]:
    """β/δ above which the Melnikov function has simple zeros.

    For duffing1 the value derived from M(θ) is reported together with the
    value printed in the literature, (4/π) cosh(πω/2).
    """
    get_preset(name)
    if name == "duffing1":
        return {
            "derived": 2.0 * math.sqrt(2.0) / (3.0 * math.pi * omega) * math.cosh(math.pi * omega / 2.0),
            "printed": 4.0 / math.pi * math.cosh(math.pi * omega / 2.0),
        }
    value = 2.0 / (3.0 * math.pi * omega) * math.sinh(math.pi * omega / math.sqrt(2.0))
    return {"derived": value, "printed": value}
