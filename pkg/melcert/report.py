"""JSON and CSV report writers.

Floats are written with their shortest round-trip repr so repeated runs
produce byte-identical files; complex values become {"re", "im"} objects.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd

from melcert.melnikov.certificate import NON_INTEGRABLE
from melcert.melnikov.coefficients import eval_melnikov
from melcert.models import Certificate, MelnikovSeries, MonodromyPair, SplittingPoint, ZeroPoint

VERDICT_LABELS = {NON_INTEGRABLE: "non-integrable"}


def verdict_label(verdict: str | None) -> str | None:
    if verdict is None:
        return None
    return VERDICT_LABELS.get(verdict, "inconclusive")


def _float(x: float) -> float | str:
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types for numpy scalars/arrays, complex numbers and nested containers."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _float(obj.real), "im": _float(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    return obj


def dumps(data: Any) -> str:
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True) + "\n"


def write_json(data: Any, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data))
    return path


def _shortest(x) -> str:
    return repr(float(x))


def write_csv(df: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=_shortest, lineterminator="\n")
    return path


# ── Melnikov ───────────────────────────────────────────────────────────────


def series_report(
    series: MelnikovSeries,
    certificate: Certificate | None = None,
    zeros: Sequence[ZeroPoint] | None = None,
) -> dict:
    data: dict[str, Any] = {
        "orbit_id": series.orbit_id,
        "convention": series.convention,
        "omega": series.omega,
        "N": series.n,
        "coeffs": [
            {"j": j, "re": series.coeff(j).real, "im": series.coeff(j).imag, "err": series.error(j)}
            for j in range(-series.n, series.n + 1)
        ],
    }
    if certificate is not None:
        data["verdict"] = verdict_label(certificate.verdict)
        data["witness"] = certificate.witness
        data["margin"] = certificate.margin
    if zeros is not None:
        data["zeros"] = [{"theta": z.theta, "slope": z.slope, "simple": z.simple} for z in zeros]
    return data


def series_from_report(data: dict) -> MelnikovSeries:
    """Inverse of series_report for the coefficient table."""
    n = int(data["N"])
    rows = sorted(data["coeffs"], key=lambda r: r["j"])
    coeffs = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    err = np.array([float(r["err"]) for r in rows])
    return MelnikovSeries(
        n=n,
        coeffs=coeffs,
        err=err,
        omega=float(data["omega"]),
        orbit_id=data["orbit_id"],
        convention=data.get("convention", "max-distance-origin"),
    )


def melnikov_table(series: MelnikovSeries, n_grid: int = 256, zeros: Sequence[ZeroPoint] = ()) -> pd.DataFrame:
    """M(θ) on a uniform grid, with the zeros inserted as flagged rows."""
    grid = 2.0 * np.pi * np.arange(n_grid) / n_grid
    rows = [{"theta": float(t), "M": float(m), "zero": False, "simple": False} for t, m in zip(grid, eval_melnikov(series, grid))]
    for z in zeros:
        rows.append({"theta": z.theta, "M": float(eval_melnikov(series, z.theta)), "zero": True, "simple": z.simple})
    return pd.DataFrame(rows).sort_values("theta", kind="mergesort").reset_index(drop=True)


# ── Monodromy ──────────────────────────────────────────────────────────────


def monodromy_report(pair: MonodromyPair, extra: dict | None = None) -> dict:
    data = {
        "ell": pair.ell,
        "lambda_plus": pair.lam_plus,
        "lambda_minus": pair.lam_minus,
        "M_plus": pair.M_plus,
        "M_minus": pair.M_minus,
        "commutator_norm": pair.commutator_norm,
        "verdict": verdict_label(pair.verdict),
    }
    data.update(extra or {})
    return data


# ── Splitting ──────────────────────────────────────────────────────────────


def profile_table(points: Sequence[SplittingPoint], eps: float | None = None) -> pd.DataFrame:
    df = pd.DataFrame(
        {
            "theta": [p.theta for p in points],
            "d": [p.d for p in points],
            "d_scaled": [p.d_scaled for p in points],
            "M_theta": [p.m_theta for p in points],
            "abs_err": [p.abs_err for p in points],
        }
    )
    if eps is not None:
        df.insert(0, "eps", float(eps))
    return df


def convergence_summary(eps_values: Sequence[float], errors: Sequence[float]) -> dict:
    """Error against ε and the least-squares order of log(error) in log(ε)."""
    rows = [{"eps": e, "max_abs_err": err} for e, err in zip(eps_values, errors)]
    usable = [(e, err) for e, err in zip(eps_values, errors) if e > 0 and err > 0]
    order = None
    if len(usable) >= 2:
        x = np.log([e for e, _ in usable])
        y = np.log([err for _, err in usable])
        order = float(np.polyfit(x, y, 1)[0])
    return {"errors": rows, "fitted_order": order}
