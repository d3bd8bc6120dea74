"""System definition documents.

A document is a JSON object:

    {
      "hamiltonian": [[i, j, c], ...],
      "perturbation": [{"component": 2, "harmonic": 1, "phase": "cos", "poly": [[0, 0, 1.0]]}],
      "perturbation_hat": [{"component": 2, "harmonic": -1, "poly": [[0, 0, 0.5, 0.0]]}],
      "omega": 1.0,
      "name": "my-system",
      "preset": "duffing1",
      "saddles": [[-1.0, 0.0], [1.0, 0.0]],
      "params": {"beta": 1.0, "delta": 0.0, "omega": 1.0}
    }

`preset` overrides `hamiltonian` and both perturbation lists. Entries of
`perturbation_hat` are explicit complex coefficients ĝ_j and are checked
for conjugate symmetry.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

from melcert.errors import SchemaError
from melcert.models import PlanarSystem
from melcert.system.fourier import FourierVectorField
from melcert.system.polynomial import ZERO, Polynomial2
from melcert.system.presets import build_preset

logger = logging.getLogger(__name__)

_KNOWN_KEYS = {"hamiltonian", "perturbation", "perturbation_hat", "omega", "name", "preset", "params", "saddles"}


def _require_list(doc: dict, key: str) -> list:
    value = doc.get(key, [])
    if not isinstance(value, list):
        raise SchemaError(f"'{key}' must be a list")
    return value


def _poly(value: Any, where: str) -> Polynomial2:
    if not isinstance(value, list):
        raise SchemaError(f"{where}: poly must be a list of monomials")
    try:
        return Polynomial2.from_monomials(value)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"{where}: {exc}") from exc


def _perturbation(doc: dict) -> FourierVectorField:
    terms = []
    for k, entry in enumerate(_require_list(doc, "perturbation")):
        if not isinstance(entry, dict):
            raise SchemaError(f"perturbation[{k}] must be an object")
        missing = {"component", "harmonic", "phase", "poly"} - entry.keys()
        if missing:
            raise SchemaError(f"perturbation[{k}] missing {sorted(missing)}")
        terms.append({**entry, "poly": _poly(entry["poly"], f"perturbation[{k}]")})
    field = FourierVectorField.from_terms(terms)

    hat_entries = _require_list(doc, "perturbation_hat")
    if not hat_entries:
        return field

    hat: dict[int, list[Polynomial2]] = {j: list(field.hat(j)) for j in range(-field.n, field.n + 1)}
    for k, entry in enumerate(hat_entries):
        if not isinstance(entry, dict):
            raise SchemaError(f"perturbation_hat[{k}] must be an object")
        missing = {"component", "harmonic", "poly"} - entry.keys()
        if missing:
            raise SchemaError(f"perturbation_hat[{k}] missing {sorted(missing)}")
        comp = entry["component"]
        if comp not in (1, 2):
            raise SchemaError(f"perturbation_hat[{k}]: component must be 1 or 2")
        j = entry["harmonic"]
        if not isinstance(j, int):
            raise SchemaError(f"perturbation_hat[{k}]: harmonic must be an integer")
        pair = hat.setdefault(j, [ZERO, ZERO])
        pair[comp - 1] = pair[comp - 1] + _poly(entry["poly"], f"perturbation_hat[{k}]")
    combined = FourierVectorField.from_hat({j: (p[0], p[1]) for j, p in hat.items()}, n=field.n)
    combined.check_reality()
    return combined


def _saddles(doc: dict) -> tuple[tuple[float, float], ...]:
    """Optional `saddles`: [[x1, x2], [x1, x2]] guesses for source and target."""
    rows = _require_list(doc, "saddles")
    if rows and len(rows) not in (1, 2):
        raise SchemaError("'saddles' takes one (homoclinic) or two (heteroclinic) points")
    out = []
    for row in rows:
        if not isinstance(row, list) or len(row) != 2:
            raise SchemaError(f"saddle guess must be [x1, x2], got {row!r}")
        out.append((float(row[0]), float(row[1])))
    return tuple(out)


def parse_system(doc: dict) -> PlanarSystem:
    """Validate a definition document and build the system it describes."""
    if not isinstance(doc, dict):
        raise SchemaError("system definition must be a JSON object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        logger.warning("Ignoring unknown keys in system definition: %s", sorted(unknown))

    if "preset" in doc:
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise SchemaError("'params' must be an object")
        bad = set(params) - {"beta", "delta", "omega"}
        if bad:
            raise SchemaError(f"unknown preset params {sorted(bad)}")
        omega = params.get("omega", doc.get("omega"))
        return build_preset(doc["preset"], params.get("beta"), params.get("delta"), omega)

    if "hamiltonian" not in doc:
        raise SchemaError("'hamiltonian' is required without a preset")
    if "omega" not in doc:
        raise SchemaError("'omega' is required without a preset")
    try:
        omega = float(doc["omega"])
    except (TypeError, ValueError):
        raise SchemaError(f"omega must be a number, got {doc['omega']!r}") from None
    if not omega > 0.0:
        raise SchemaError(f"omega must be positive, got {omega}")

    H = _poly(doc["hamiltonian"], "hamiltonian")
    if not H.is_real():
        raise SchemaError("hamiltonian coefficients must be real")
    return PlanarSystem(
        H=H,
        g=_perturbation(doc),
        omega=omega,
        name=str(doc.get("name", "custom")),
        saddle_guesses=_saddles(doc),
    )


def load_system(path: str | Path) -> PlanarSystem:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read ({exc})") from exc
    return parse_system(doc)
