"""Exact separatrices of the Duffing presets.

Evaluation accepts real or complex time. Real arguments use an
overflow-free sech; complex arguments go through numpy's cosh so the
orbit can be continued off the real axis.
"""

from __future__ import annotations

import numpy as np

from melcert.config import settings
from melcert.errors import UnknownPreset
from melcert.models import Orbit, PlanarSystem
from melcert.system.model import saddle_at
from melcert.system.presets import build_preset, get_preset

SQRT2 = np.sqrt(2.0)


def _sech(t):
    t = np.asarray(t)
    if np.iscomplexobj(t):
        return 1.0 / np.cosh(t)
    e = np.exp(-np.abs(t))
    return 2.0 * e / (1.0 + e * e)


def closed_form_state(preset: str, branch: int, t) -> np.ndarray:
    """x^h(t) as an array of shape (2, ...)."""
    b = 1.0 if branch > 0 else -1.0
    if preset == "duffing1":
        s = _sech(t)
        return b * np.array([SQRT2 * s, -SQRT2 * s * np.tanh(t)])
    if preset == "duffing2":
        u = np.asarray(t) / SQRT2
        s = _sech(u)
        return b * np.array([np.tanh(u), s * s / SQRT2])
    raise UnknownPreset(f"no closed-form separatrix for {preset!r}")


def closed_form_orbit(preset: str, branch: int = 1, sys: PlanarSystem | None = None) -> Orbit:
    """Orbit record for a preset separatrix.

    duffing1 is homoclinic to the origin (branch − is the mirror loop);
    duffing2 branch ± runs from (∓1, 0) to (±1, 0).
    """
    spec = get_preset(preset)
    if sys is None:
        sys = build_preset(preset)
    b = 1 if branch > 0 else -1
    src, dst = (np.array(g, dtype=float) * b for g in spec.saddle_guesses)
    source = saddle_at(sys, src)
    target = source if preset == "duffing1" else saddle_at(sys, dst)
    return Orbit(
        source=source,
        target=target,
        energy=float(sys.energy(source.x)),
        kind="closed_form",
        system=sys,
        preset=preset,
        branch=b,
        t_orbit=float(np.log(1.0 / settings.tail_decay) / min(source.lam, target.lam)),
    )
