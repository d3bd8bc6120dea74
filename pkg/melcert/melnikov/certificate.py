"""Nonintegrability certificate from a nonconstant Melnikov function."""

from __future__ import annotations

import logging

from melcert.config import settings
from melcert.models import Certificate, MelnikovSeries

logger = logging.getLogger(__name__)

NON_INTEGRABLE = "NonIntegrable"
INCONCLUSIVE = "Inconclusive"


def witness_harmonic(series: MelnikovSeries) -> int | None:
    """Positive ℓ with the largest |M̂_ℓ|; the smallest such ℓ on ties."""
    if series.n == 0:
        return None
    return max(range(1, series.n + 1), key=lambda j: (abs(series.coeff(j)), -j))


def certify_nonintegrability(series: MelnikovSeries, tol_cert: float | None = None) -> Certificate:
    """NonIntegrable iff |M̂_ℓ| − err_ℓ − tol_cert > 0 for the witness ℓ.

    A constant M never yields "integrable", only Inconclusive.
    """
    tol_cert = settings.tol_cert if tol_cert is None else tol_cert
    ell = witness_harmonic(series)
    if ell is None:
        return Certificate(verdict=INCONCLUSIVE, witness=None, margin=-tol_cert, series=series)
    margin = abs(series.coeff(ell)) - series.error(ell) - tol_cert
    verdict = NON_INTEGRABLE if margin > 0.0 else INCONCLUSIVE
    logger.info("Certificate: %s (witness %d, margin %.3e)", verdict, ell, margin)
    return Certificate(verdict=verdict, witness=ell, margin=margin, series=series)
