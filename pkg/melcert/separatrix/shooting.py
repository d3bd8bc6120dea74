"""Separatrices by shooting along the unstable direction.

The trajectory leaves `source` at distance δ₀ along its unstable
eigenvector and is integrated (DOP853, dense output) until it enters the
ball of radius r_stop around `target`. Time is then shifted so that t = 0
is the point farthest from the saddles: a root of (x − x_s)·ẋ on a
homoclinic loop, the equidistant point on a heteroclinic connection.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from melcert.config import settings
from melcert.errors import (
    EnergyMismatch,
    LostHyperbolicity,
    NoConnection,
    NotClosedForm,
    PreconditionError,
    SchemaError,
)
from melcert.models import Orbit, PlanarSystem, Saddle

logger = logging.getLogger(__name__)

ESCAPE_RADIUS = 1e3


def _phase_function(sys: PlanarSystem, source: Saddle, target: Saddle):
    if np.allclose(source.x, target.x):
        return lambda x: float(np.dot(x - source.x, sys.field(x)))
    return lambda x: float(np.sum((x - source.x) ** 2) - np.sum((x - target.x) ** 2))


def shoot_separatrix(
    sys: PlanarSystem,
    source: Saddle,
    target: Saddle,
    branch: int = 1,
    delta0: float | None = None,
    r_stop: float | None = None,
    max_time: float | None = None,
    rtol: float | None = None,
    atol: float | None = None,
) -> Orbit:
    delta0 = settings.shoot_delta0 if delta0 is None else delta0
    r_stop = settings.shoot_r_stop if r_stop is None else r_stop
    max_time = settings.shoot_max_time if max_time is None else max_time
    rtol = settings.ode_rtol if rtol is None else rtol
    atol = settings.ode_atol if atol is None else atol

    for end in (source, target):
        if np.linalg.norm(sys.field(end.x)) > settings.tol_eq:
            raise PreconditionError(f"{end.x.tolist()} is not an equilibrium")
    h = float(sys.energy(source.x))
    gap = abs(float(sys.energy(target.x)) - h)
    if gap > settings.tol_energy:
        raise EnergyMismatch(f"H differs by {gap:.3e} between {source.x.tolist()} and {target.x.tolist()}")

    sign = 1.0 if branch > 0 else -1.0
    x0 = source.x + sign * delta0 * source.v_u

    def arrive(t, y):
        return np.linalg.norm(y - target.x) - r_stop

    arrive.terminal = True
    arrive.direction = -1

    def escape(t, y):
        return ESCAPE_RADIUS - np.linalg.norm(y - source.x)

    escape.terminal = True

    sol = solve_ivp(
        lambda t, y: sys.field(y),
        (0.0, max_time),
        x0,
        method="DOP853",
        rtol=rtol,
        atol=atol,
        events=(arrive, escape),
        dense_output=True,
    )
    if not sol.success:
        raise NoConnection(f"integration failed: {sol.message}")
    if sol.t_events[1].size:
        raise NoConnection(f"trajectory left the radius-{ESCAPE_RADIUS:g} ball around {source.x.tolist()}")
    if not sol.t_events[0].size:
        raise NoConnection(f"no arrival at {target.x.tolist()} within t = {max_time:g}")
    t_end = float(sol.t_events[0][0])

    # arrival must be along the stable direction
    coef = np.linalg.solve(target.q_matrix, sol.sol(t_end) - target.x)
    if abs(coef[0]) > abs(coef[1]):
        raise LostHyperbolicity(
            f"arrival at {target.x.tolist()} dominated by the unstable direction ({coef[0]:.3e} vs {coef[1]:.3e})"
        )

    phase = _phase_function(sys, source, target)
    values = np.array([phase(sol.sol(tk)) for tk in sol.t])
    flips = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0)
    if not flips.size:
        raise NoConnection("no phase origin on the shot trajectory")
    k = int(flips[0])
    if values[k] == 0.0:
        t_origin = float(sol.t[k])
    else:
        t_origin = brentq(lambda s: phase(sol.sol(s)), sol.t[k], sol.t[k + 1], xtol=1e-14)

    t_orbit = float(np.log(1.0 / settings.tail_decay) / min(source.lam, target.lam))
    logger.info(
        "Shot %s -> %s: arrival t=%.6f, origin t=%.6f, %d steps",
        source.x.tolist(), target.x.tolist(), t_end, t_origin, sol.t.size,
    )
    return Orbit(
        source=source,
        target=target,
        energy=h,
        kind="numeric",
        system=sys,
        branch=int(sign),
        dense=sol.sol,
        t_offset=t_origin,
        t_min=-t_origin,
        t_max=t_end - t_origin,
        t_orbit=t_orbit,
        t_grid=sol.t[sol.t <= t_end] - t_origin,
    )


def find_orbit(sys: PlanarSystem, branch: int = 1, method: str = "auto") -> Orbit:
    """Separatrix of `sys`: closed form for presets unless `method="numeric"`.

    Non-preset systems need saddle guesses (source, target) in the system
    definition; a single guess means a homoclinic loop. Branch − mirrors the
    guesses through the origin for presets and flips the departure direction.
    """
    from melcert.separatrix.closed_form import closed_form_orbit
    from melcert.system.model import refine_saddle

    is_preset = sys.preset is not None
    if method == "closed_form" and not is_preset:
        raise NotClosedForm(f"{sys.name!r} has no closed-form separatrix")
    if method in ("auto", "closed_form") and is_preset:
        return closed_form_orbit(sys.preset, branch, sys)
    guesses = sys.saddle_guesses
    if not guesses:
        raise SchemaError("system definition needs 'saddles' to locate a separatrix")
    mirror = -1.0 if (branch < 0 and is_preset) else 1.0
    source = refine_saddle(sys, mirror * np.asarray(guesses[0], dtype=float))
    target = source if len(guesses) == 1 else refine_saddle(sys, mirror * np.asarray(guesses[-1], dtype=float))
    return shoot_separatrix(sys, source, target, branch=branch)
