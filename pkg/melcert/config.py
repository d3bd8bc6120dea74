"""Settings loader with named tolerance profiles.

Pick which env file to load via the MELCERT_ENV var:

    MELCERT_ENV=strict uv run python pipeline.py certify ...   # loads .env.strict
    MELCERT_ENV=fast   uv run python pipeline.py sweep ...     # loads .env.fast
    uv run python pipeline.py certify ...                      # loads .env (default)

Every field can also be set directly in the environment (TOL_CERT=1e-9, ...).
SM_LOG sets the log level for the CLI.
"""

from __future__ import annotations

import os
from pathlib import Path

from dotenv import load_dotenv
from pydantic_settings import BaseSettings


def _resolve_env_file() -> str:
    name = os.environ.get("MELCERT_ENV", "").strip()
    if name:
        return f".env.{name}"
    return ".env"


_ENV_FILE = _resolve_env_file()
if Path(_ENV_FILE).exists():
    # override=True so switching profiles mid-shell works as expected
    load_dotenv(_ENV_FILE, override=True)


class Settings(BaseSettings):
    # ── Saddles ───────────────────────────────────────────────────────────
    tol_eq: float = 1e-12
    newton_max_iter: int = 50

    # ── Separatrix shooting ───────────────────────────────────────────────
    tol_energy: float = 1e-10
    ode_rtol: float = 1e-12
    ode_atol: float = 1e-14
    shoot_delta0: float = 1e-8
    shoot_r_stop: float = 1e-6
    shoot_max_time: float = 200.0
    tail_decay: float = 1e-14  # T_orbit chosen so exp(-lambda*T_orbit) < tail_decay
    tol_interp: float = 1e-9

    # ── Melnikov ──────────────────────────────────────────────────────────
    tol_coeff: float = 1e-10
    tol_cert: float = 1e-8
    tol_simple: float = 1e-8
    zero_oversample: int = 64  # samples per harmonic when scanning for zeros

    # ── Variational / monodromy ───────────────────────────────────────────
    match_decay: float = 1e-10  # T_match chosen so exp(-lambda*T_match) < match_decay
    tol_commutator: float = 1e-8
    continuation_t0: float = 10.0  # |Re t0| of the continuation base point

    # ── Splitting simulation ──────────────────────────────────────────────
    seed_delta: float = 1e-7
    spacing_max: float = 1e-3
    box_factor: float = 3.0
    strobe_rtol: float = 1e-12

    # ── Runtime ───────────────────────────────────────────────────────────
    threads: int = 0  # 0 = available parallelism
    output_dir: str = "output"
    sm_log: str = "WARNING"

    model_config = {"env_file_encoding": "utf-8", "extra": "ignore"}


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else settings, else CPU count."""
    n = threads if threads else settings.threads
    if n and n > 0:
        return n
    return os.cpu_count() or 1


settings = Settings()
