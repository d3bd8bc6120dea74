"""Tests for melcert.variational."""

import math

import numpy as np
import pytest

from melcert.errors import NotClosedForm, PoleCrossing
from melcert.melnikov.certificate import INCONCLUSIVE, NON_INTEGRABLE
from melcert.separatrix.closed_form import closed_form_orbit
from melcert.separatrix.orbit import orbit_state
from melcert.separatrix.shooting import find_orbit
from melcert.system.presets import build_preset
from melcert.variational.asymptotics import chi_limit_numeric, extrapolate, orbit_asymptotics
from melcert.variational.connection import connection_matrices, gauge_matrix, wronskian_check
from melcert.variational.continuation import monodromy_via_continuation, to_asymptotic_frame
from melcert.variational.fundamental import fundamental_X
from melcert.variational.monodromy import asymptotic_data, c_vectors, commutator_certificate, monodromy_pair

SQRT2 = math.sqrt(2.0)


def _orbit(preset: str, beta: float = 1.0, delta: float = 0.0, omega: float = 1.0):
    sys = build_preset(preset, beta, delta, omega)
    return sys, closed_form_orbit(preset, sys=sys)


def _pair(preset: str, beta: float, delta: float = 0.0, gauge=(0.0, 0.0)):
    sys, orbit = _orbit(preset, beta, delta)
    pair = monodromy_pair(asymptotic_data(orbit, sys, 1, gauge=gauge), sys.omega)
    commutator_certificate(pair)
    return pair


# ── Asymptotics ────────────────────────────────────────────────────────────


def test_extrapolate_recovers_polynomial_intercept():
    s = np.geomspace(1e-2, 1e-4, 9)
    assert extrapolate(s, 3.0 + 2.0 * s - s**2) == pytest.approx(3.0, abs=1e-12)
    np.testing.assert_allclose(extrapolate(s, np.column_stack([s + 1.0, 2.0 * s - 4.0])), [1.0, -4.0], atol=1e-12)


def test_duffing1_limits():
    _, orbit = _orbit("duffing1")
    lim = orbit_asymptotics(orbit)
    np.testing.assert_allclose(lim.xi_plus, [-2 * SQRT2, 2 * SQRT2], atol=1e-6)
    np.testing.assert_allclose(lim.xi_minus, [2 * SQRT2, 2 * SQRT2], atol=1e-6)
    assert lim.chi_plus == pytest.approx(1.0 / 16.0, abs=1e-6)
    assert lim.chi_minus == pytest.approx(-1.0 / 16.0, abs=1e-6)
    assert not lim.swapped


def test_duffing2_limits():
    _, orbit = _orbit("duffing2")
    lim = orbit_asymptotics(orbit)
    np.testing.assert_allclose(lim.xi_plus, [2 * SQRT2, -4.0], atol=1e-6)
    assert lim.chi_plus == pytest.approx(1.0 / (16.0 * SQRT2), abs=1e-6)
    assert lim.chi_minus == pytest.approx(-1.0 / (16.0 * SQRT2), abs=1e-6)


@pytest.mark.parametrize("preset", ["duffing1", "duffing2"])
def test_numeric_chi_limit_matches_closed_form(preset):
    _, orbit = _orbit(preset)
    lim = orbit_asymptotics(orbit)
    assert chi_limit_numeric(orbit, 1, lim.swapped) == pytest.approx(lim.chi_plus, abs=1e-6)
    assert chi_limit_numeric(orbit, -1, lim.swapped) == pytest.approx(lim.chi_minus, abs=1e-6)


def test_shot_orbit_limits_match_closed_form():
    sys = build_preset("duffing2")
    closed = orbit_asymptotics(closed_form_orbit("duffing2", sys=sys))
    shot = orbit_asymptotics(find_orbit(sys, method="numeric"))
    np.testing.assert_allclose(shot.xi_plus, closed.xi_plus, atol=1e-6)
    np.testing.assert_allclose(shot.xi_minus, closed.xi_minus, atol=1e-6)
    assert shot.chi_plus == pytest.approx(closed.chi_plus, abs=1e-6)


# ── Fundamental matrix ─────────────────────────────────────────────────────


@pytest.mark.parametrize("preset,t,branch", [("duffing2", 0.5, 1), ("duffing2", -2.0, -1), ("duffing1", 1.5, 1)])
def test_fundamental_matrix_is_unimodular_solution(preset, t, branch):
    sys, orbit = _orbit(preset)
    x = fundamental_X(orbit, t, branch)
    assert np.linalg.det(x) == pytest.approx(1.0, abs=1e-9)
    h = 1e-5
    dx = (fundamental_X(orbit, t + h, branch) - fundamental_X(orbit, t - h, branch)) / (2 * h)
    np.testing.assert_allclose(dx, sys.jacobian_at(orbit_state(orbit, t)) @ x, atol=1e-6)


def test_fundamental_matrix_refuses_to_cross_a_pole():
    _, orbit = _orbit("duffing1")
    with pytest.raises(PoleCrossing):
        fundamental_X(orbit, -1.0, branch=1)


# ── Connection ─────────────────────────────────────────────────────────────


@pytest.mark.parametrize("preset", ["duffing1", "duffing2"])
def test_connection_data_is_consistent(preset):
    _, orbit = _orbit(preset)
    data = connection_matrices(orbit)
    assert wronskian_check(data) < 1e-6
    assert data.residual_plus < 1e-4
    assert data.residual_minus < 1e-4
    np.testing.assert_allclose(data.B_plus @ data.B0, data.B_minus, atol=1e-9)


def test_gauge_shifts_the_dominant_column():
    _, orbit = _orbit("duffing2")
    base = connection_matrices(orbit)
    shifted = connection_matrices(orbit, gauge=(0.3, -0.2))
    np.testing.assert_allclose(shifted.B_plus, base.B_plus + gauge_matrix(-0.2, base.Q_plus), atol=1e-12)
    np.testing.assert_allclose(shifted.B_minus, base.B_minus + gauge_matrix(0.3, base.Q_minus), atol=1e-12)
    assert shifted.residual_plus == pytest.approx(base.residual_plus, abs=1e-3)


# ── Monodromy ──────────────────────────────────────────────────────────────


def test_c_vectors_solve_the_forced_linear_system():
    sys, orbit = _orbit("duffing2", beta=0.8, omega=1.3)
    c_plus, _ = c_vectors((orbit.target, orbit.source), sys, 1)
    a = sys.jacobian_at(orbit.target.x)
    lhs = (1j * sys.omega * np.eye(2) - a) @ c_plus
    np.testing.assert_allclose(lhs, sys.g.hat_at(1, orbit.target.x), atol=1e-14)


def test_monodromy_pair_shape():
    pair = _pair("duffing2", 1.0, 1.0)
    e_minus = math.exp(-2 * math.pi / SQRT2)
    assert pair.M_minus[2, 2] == pytest.approx(e_minus)
    assert pair.M_plus[2, 2] == pytest.approx(1.0 / e_minus)
    for m in (pair.M_minus, pair.M_plus):
        np.testing.assert_array_equal(m[:2, :2], np.eye(2))
        np.testing.assert_array_equal(m[2, :2], [0.0, 0.0])


@pytest.mark.parametrize("preset", ["duffing1", "duffing2"])
@pytest.mark.parametrize("delta", [0.0, 1.0])
def test_commutator_certifies_forced_systems(preset, delta):
    pair = _pair(preset, 1.0, delta)
    assert pair.commutator_norm > 1e-6
    assert pair.verdict == NON_INTEGRABLE


@pytest.mark.parametrize("preset", ["duffing1", "duffing2"])
def test_unforced_pair_commutes(preset):
    pair = _pair(preset, 0.0, 1.0)
    assert pair.commutator_norm <= 1e-10
    assert pair.verdict == INCONCLUSIVE


def test_commutator_is_linear_in_beta():
    norms = [_pair("duffing2", beta).commutator_norm for beta in (0.5, 1.0, 2.0)]
    assert norms[1] == pytest.approx(2.0 * norms[0], rel=1e-2)
    assert norms[2] == pytest.approx(2.0 * norms[1], rel=1e-2)


def test_verdict_does_not_depend_on_gauge():
    assert _pair("duffing1", 1.0, gauge=(0.3, -0.2)).verdict == NON_INTEGRABLE
    assert _pair("duffing1", 0.0, gauge=(0.3, -0.2)).verdict == INCONCLUSIVE


# ── Continuation ───────────────────────────────────────────────────────────


def test_continuation_around_the_origin():
    sys, orbit = _orbit("duffing1")
    res = monodromy_via_continuation(sys, orbit, 1, -1)
    corner = math.exp(-2 * math.pi)
    assert res.corner == pytest.approx(corner, rel=1e-10)
    np.testing.assert_array_equal(res.matrix[2, :2], [0.0, 0.0])
    block = res.matrix[:2, :2]
    assert np.linalg.det(block) == pytest.approx(1.0, abs=1e-8)
    assert np.trace(block) == pytest.approx(2.0, abs=1e-8)
    assert res.shear > 0.0


def test_asymptotic_loop_conjugates_to_closed_form():
    sys, orbit = _orbit("duffing1")
    data = asymptotic_data(orbit, sys, 1)
    closed = monodromy_pair(data, sys.omega).M_minus
    loop = np.diag([1.0, 1.0, closed[2, 2]]).astype(complex)
    np.testing.assert_allclose(to_asymptotic_frame(loop, data.c_minus), closed, atol=1e-15)


def test_continuation_column_follows_sheared_closed_form():
    sys, orbit = _orbit("duffing1")
    res = monodromy_via_continuation(sys, orbit, 1, -1)
    _, c_minus = c_vectors((orbit.target, orbit.source), sys, 1)
    np.testing.assert_array_equal(res.c, c_minus)
    assert res.closed_form_gap < 1e-3


def test_continuation_plus_side_corner():
    sys, orbit = _orbit("duffing1")
    res = monodromy_via_continuation(sys, orbit, 1, 1)
    assert res.corner == pytest.approx(math.exp(2 * math.pi), rel=1e-10)
    assert res.t0 == pytest.approx(10.0)


def test_continuation_without_forcing_is_block_diagonal():
    sys, orbit = _orbit("duffing1", beta=0.0)
    res = monodromy_via_continuation(sys, orbit, 1, -1)
    np.testing.assert_array_equal(res.matrix[:2, 2], [0.0, 0.0])


def test_continuation_independent_of_base_point():
    sys, orbit = _orbit("duffing1")
    a = monodromy_via_continuation(sys, orbit, 1, -1, t0=-10.0)
    b = monodromy_via_continuation(sys, orbit, 1, -1, t0=-12.0)
    np.testing.assert_allclose(a.matrix[:2, :2], b.matrix[:2, :2], atol=1e-6)


def test_continuation_needs_closed_form():
    sys = build_preset("duffing2")
    with pytest.raises(NotClosedForm):
        monodromy_via_continuation(sys, find_orbit(sys, method="numeric"), 1, -1)
