"""Bivariate polynomials with exact differentiation.

Hamiltonians and the Fourier coefficients of the perturbation are both
stored as Polynomial2, so every derivative used downstream is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from melcert.errors import SchemaError

Monomial = tuple[int, int, complex | float]


def _normalize(c: complex | float) -> complex | float:
    c = complex(c)
    return c.real if c.imag == 0.0 else c


@dataclass(frozen=True)
class Polynomial2:
    """p(x1, x2) = sum of c * x1**i * x2**j over `terms`.

    Terms are kept sorted by exponent pair with duplicates merged and zero
    coefficients dropped, so equal polynomials compare equal.
    """

    terms: tuple[Monomial, ...] = ()

    @classmethod
    def from_monomials(cls, rows: Iterable[Iterable]) -> Polynomial2:
        """Build from rows `[i, j, c]` or `[i, j, re, im]`."""
        merged: dict[tuple[int, int], complex] = {}
        for row in rows:
            row = list(row)
            if len(row) == 3:
                i, j, c = row
                coeff = complex(c)
            elif len(row) == 4:
                i, j, re, im = row
                coeff = complex(float(re), float(im))
            else:
                raise SchemaError(f"monomial must be [i, j, c] or [i, j, re, im], got {row!r}")
            if int(i) != i or int(j) != j or i < 0 or j < 0:
                raise SchemaError(f"exponents must be nonnegative integers, got ({i}, {j})")
            key = (int(i), int(j))
            merged[key] = merged.get(key, 0j) + coeff
        return cls._from_dict(merged)

    @classmethod
    def constant(cls, c: complex | float) -> Polynomial2:
        return cls._from_dict({(0, 0): complex(c)})

    @classmethod
    def _from_dict(cls, merged: dict[tuple[int, int], complex]) -> Polynomial2:
        terms = tuple(
            (i, j, _normalize(c)) for (i, j), c in sorted(merged.items()) if c != 0
        )
        return cls(terms)

    def _as_dict(self) -> dict[tuple[int, int], complex]:
        return {(i, j): complex(c) for i, j, c in self.terms}

    # ── Evaluation ───────────────────────────────────────────────────────

    def __call__(self, x1, x2):
        """Evaluate at scalars or arrays (real or complex)."""
        out = 0.0 * x1 + 0.0 * x2
        for i, j, c in self.terms:
            out = out + c * x1**i * x2**j
        return out

    # ── Algebra ──────────────────────────────────────────────────────────

    def diff(self, var: int) -> Polynomial2:
        """Partial derivative with respect to x1 (var=0) or x2 (var=1)."""
        merged: dict[tuple[int, int], complex] = {}
        for i, j, c in self.terms:
            if var == 0 and i > 0:
                merged[(i - 1, j)] = merged.get((i - 1, j), 0j) + i * complex(c)
            elif var == 1 and j > 0:
                merged[(i, j - 1)] = merged.get((i, j - 1), 0j) + j * complex(c)
        return Polynomial2._from_dict(merged)

    def gradient(self) -> tuple[Polynomial2, Polynomial2]:
        return self.diff(0), self.diff(1)

    def hessian(self) -> tuple[tuple[Polynomial2, Polynomial2], tuple[Polynomial2, Polynomial2]]:
        d1, d2 = self.gradient()
        return (d1.diff(0), d1.diff(1)), (d2.diff(0), d2.diff(1))

    def __add__(self, other: Polynomial2) -> Polynomial2:
        merged = self._as_dict()
        for key, c in other._as_dict().items():
            merged[key] = merged.get(key, 0j) + c
        return Polynomial2._from_dict(merged)

    def __neg__(self) -> Polynomial2:
        return self.scale(-1.0)

    def __sub__(self, other: Polynomial2) -> Polynomial2:
        return self + (-other)

    def scale(self, factor: complex | float) -> Polynomial2:
        return Polynomial2._from_dict({k: c * factor for k, c in self._as_dict().items()})

    def conj(self) -> Polynomial2:
        return Polynomial2._from_dict({k: c.conjugate() for k, c in self._as_dict().items()})

    # ── Inspection ───────────────────────────────────────────────────────

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((i + j for i, j, _ in self.terms), default=0)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for _, _, c in self.terms), default=0.0)

    def is_real(self, tol: float = 0.0) -> bool:
        return all(abs(complex(c).imag) <= tol for _, _, c in self.terms)

    def real_part(self) -> Polynomial2:
        return Polynomial2._from_dict({k: complex(c.real) for k, c in self._as_dict().items()})

    def to_monomials(self) -> list[list]:
        """Rows `[i, j, c]` for real coefficients, `[i, j, re, im]` otherwise."""
        rows = []
        for i, j, c in self.terms:
            if isinstance(c, complex):
                rows.append([i, j, c.real, c.imag])
            else:
                rows.append([i, j, c])
        return rows


ZERO = Polynomial2()

