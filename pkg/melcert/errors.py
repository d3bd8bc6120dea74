"""Error taxonomy.

Configuration and precondition problems exit with code 2, numerical
failures with code 3. Every error serializes to the JSON the CLI prints on
stderr.
"""

from __future__ import annotations


class MelcertError(Exception):
    exit_code = 3

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
        }


# ── Configuration (exit 2) ─────────────────────────────────────────────────


class ConfigError(MelcertError, ValueError):
    exit_code = 2


class SchemaError(ConfigError):
    pass


class UnknownPreset(ConfigError):
    pass


class RealityViolation(ConfigError):
    pass


class PreconditionError(ConfigError):
    pass


class EnergyMismatch(PreconditionError):
    pass


class ConstantSeries(PreconditionError):
    pass


class NotClosedForm(PreconditionError):
    pass


# ── Numerical failures (exit 3) ────────────────────────────────────────────


class NumericalError(MelcertError, RuntimeError):
    exit_code = 3


class NoConvergence(NumericalError):
    pass


class NotASaddle(NumericalError):
    pass


class NoConnection(NumericalError):
    pass


class LostHyperbolicity(NumericalError):
    pass


class ToleranceNotMet(NumericalError):
    pass


class MultiHarmonic(NumericalError):
    pass


class DegenerateHessian(NumericalError):
    pass


class PoleCrossing(NumericalError):
    pass


class IllConditioned(NumericalError):
    pass


class PoleOnPath(NumericalError):
    pass


class StepFailure(NumericalError):
    pass


class Escape(NumericalError):
    pass


class FoldTooSharp(NumericalError):
    pass
