"""Tests for melcert.system.polynomial."""

import numpy as np
import pytest

from melcert.errors import SchemaError
from melcert.system.polynomial import ZERO, Polynomial2


def _duffing_h() -> Polynomial2:
    return Polynomial2.from_monomials([[0, 2, 0.5], [2, 0, -0.5], [4, 0, 0.25]])


def test_evaluate_scalar_and_array():
    h = _duffing_h()
    assert h(1.0, 0.0) == pytest.approx(-0.25)
    xs = np.array([0.0, 1.0, np.sqrt(2.0)])
    np.testing.assert_allclose(h(xs, np.zeros(3)), [0.0, -0.25, 0.0], atol=1e-15)


def test_evaluate_complex_argument():
    h = _duffing_h()
    assert h(1j, 0.0) == pytest.approx(0.5 + 0.25)


def test_duplicate_monomials_merge_and_zeros_drop():
    p = Polynomial2.from_monomials([[1, 0, 2.0], [1, 0, -2.0], [0, 1, 3.0]])
    assert p.terms == ((0, 1, 3.0),)
    assert Polynomial2.from_monomials([[0, 0, 0.0]]) == ZERO


def test_gradient_and_hessian_are_exact():
    h = _duffing_h()
    h1, h2 = h.gradient()
    assert h1 == Polynomial2.from_monomials([[1, 0, -1.0], [3, 0, 1.0]])
    assert h2 == Polynomial2.from_monomials([[0, 1, 1.0]])
    (h11, h12), (h21, h22) = h.hessian()
    assert h11(0.0, 0.0) == -1.0
    assert h12.is_zero and h21.is_zero
    assert h22(5.0, 5.0) == 1.0


def test_complex_coefficients_roundtrip_through_monomials():
    p = Polynomial2.from_monomials([[2, 1, 0.5, -1.5], [0, 0, 1.0]])
    assert not p.is_real()
    assert Polynomial2.from_monomials(p.to_monomials()) == p
    assert p.conj()(1.0, 1.0) == pytest.approx(np.conj(p(1.0, 1.0)))


def test_algebra():
    p = Polynomial2.from_monomials([[1, 0, 1.0]])
    q = Polynomial2.from_monomials([[0, 1, 2.0]])
    assert (p + q)(1.0, 1.0) == 3.0
    assert (p - p).is_zero
    assert p.scale(1j)(2.0, 0.0) == 2j
    assert (p + q).degree == 1


@pytest.mark.parametrize("row", [[1, 2], [-1, 0, 1.0], [0.5, 0, 1.0], [1, 2, 3, 4, 5]])
def test_bad_monomials_rejected(row):
    with pytest.raises(SchemaError):
        Polynomial2.from_monomials([row])
