"""Hamiltonian vector field and saddle refinement."""

from __future__ import annotations

import logging

import numpy as np

from melcert.config import settings
from melcert.errors import NoConvergence, NotASaddle
from melcert.models import PlanarSystem, Saddle

logger = logging.getLogger(__name__)


def hamiltonian_field(sys: PlanarSystem, x) -> np.ndarray:
    """J DH(x)."""
    return sys.field(np.asarray(x, dtype=float))


def _fix_sign(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    lead = v[np.flatnonzero(np.abs(v) > 1e-15)[0]]
    return v if lead > 0 else -v


def saddle_at(sys: PlanarSystem, x) -> Saddle:
    """Eigen-data of J D²H at an equilibrium; NotASaddle unless det D²H < 0."""
    x = np.asarray(x, dtype=float)
    hess = sys.hessian_at(x)
    det = float(np.linalg.det(hess))
    if det >= 0.0:
        raise NotASaddle(f"det D²H = {det:.6g} >= 0 at {x.tolist()}")
    lam = float(np.sqrt(-det))
    evals, evecs = np.linalg.eig(sys.jacobian_at(x))
    evals = evals.real
    v_u = _fix_sign(evecs[:, int(np.argmax(evals))].real)
    v_s = _fix_sign(evecs[:, int(np.argmin(evals))].real)
    return Saddle(x=x, lam=lam, v_u=v_u, v_s=v_s, hessian=hess)


def refine_saddle(
    sys: PlanarSystem,
    guess,
    tol_eq: float | None = None,
    max_iter: int | None = None,
) -> Saddle:
    """Newton on J DH(x) = 0, then classify the root."""
    tol_eq = settings.tol_eq if tol_eq is None else tol_eq
    max_iter = settings.newton_max_iter if max_iter is None else max_iter
    x = np.asarray(guess, dtype=float)
    for it in range(max_iter):
        f = sys.field(x)
        if np.linalg.norm(f) <= tol_eq:
            break
        jac = sys.jacobian_at(x)
        try:
            step = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Jacobian at {x.tolist()}") from exc
        x = x - step
        if not np.all(np.isfinite(x)):
            raise NoConvergence(f"Newton diverged from {np.asarray(guess).tolist()}")
    else:
        if np.linalg.norm(sys.field(x)) > tol_eq:
            raise NoConvergence(f"no equilibrium within {max_iter} Newton steps of {np.asarray(guess).tolist()}")
    logger.debug("Newton converged to %s in %d steps", x.tolist(), it)
    return saddle_at(sys, x)
