"""Evaluation contract shared by closed-form and shot orbits."""

from __future__ import annotations

import dataclasses

import numpy as np
import pandas as pd

from melcert.models import Orbit, OrbitPoint
from melcert.separatrix.closed_form import closed_form_state


def _numeric_state(orbit: Orbit, s: float) -> np.ndarray:
    """Numeric orbit at unshifted orbit time s, with linearized tails."""
    if s > orbit.t_max:
        sad = orbit.target
        edge = orbit.dense(orbit.t_max + orbit.t_offset)
        coef = np.linalg.solve(sad.q_matrix, edge - sad.x)[1]
        return sad.x + coef * np.exp(-sad.lam * (s - orbit.t_max)) * sad.v_s
    if s < orbit.t_min:
        sad = orbit.source
        edge = orbit.dense(orbit.t_min + orbit.t_offset)
        coef = np.linalg.solve(sad.q_matrix, edge - sad.x)[0]
        return sad.x + coef * np.exp(sad.lam * (s - orbit.t_min)) * sad.v_u
    return np.asarray(orbit.dense(s + orbit.t_offset), dtype=float)


def orbit_state(orbit: Orbit, t) -> np.ndarray:
    """x^h(t); closed-form orbits also accept complex or array t."""
    if orbit.kind == "closed_form":
        return closed_form_state(orbit.preset, orbit.branch, np.asarray(t) - orbit.shift)
    t = np.asarray(t, dtype=float)
    if t.ndim == 0:
        return _numeric_state(orbit, float(t) - orbit.shift)
    return np.stack([_numeric_state(orbit, float(tk) - orbit.shift) for tk in t], axis=1)


def orbit_eval(orbit: Orbit, t: float) -> OrbitPoint:
    """x^h(t) and ẋ^h(t) = J DH(x^h(t))."""
    x = orbit_state(orbit, t)
    return OrbitPoint(x=x, xdot=orbit.system.field(x))


def shift_orbit(orbit: Orbit, tau: float) -> Orbit:
    """Copy with x_τ(t) = x(t − τ)."""
    return dataclasses.replace(orbit, shift=orbit.shift + tau)


def orbit_energy_error(orbit: Orbit, t) -> np.ndarray:
    x = orbit_state(orbit, t)
    return np.abs(orbit.system.energy(x) - orbit.energy)


def export_grid(orbit: Orbit, n: int = 2001, t_span: float | None = None) -> pd.DataFrame:
    """Table with columns t, x1, x2, dx1, dx2, H_error on a uniform grid."""
    t_span = orbit.t_orbit if t_span is None else t_span
    t = np.linspace(-t_span, t_span, n)
    x = orbit_state(orbit, t).real
    dx = orbit.system.field(x)
    return pd.DataFrame(
        {
            "t": t,
            "x1": x[0],
            "x2": x[1],
            "dx1": dx[0],
            "dx2": dx[1],
            "H_error": np.abs(orbit.system.energy(x) - orbit.energy),
        }
    )
