"""Tests for melcert.separatrix."""

import numpy as np
import pytest

from melcert.errors import EnergyMismatch, NoConnection, NotClosedForm, PreconditionError, SchemaError
from melcert.models import Saddle
from melcert.separatrix.closed_form import closed_form_orbit, closed_form_state
from melcert.separatrix.orbit import export_grid, orbit_energy_error, orbit_eval, orbit_state, shift_orbit
from melcert.separatrix.shooting import find_orbit, shoot_separatrix
from melcert.system.model import refine_saddle
from melcert.system.parser import parse_system
from melcert.system.presets import build_preset

T_CHECK = np.linspace(-10.0, 10.0, 401)


def _custom_duffing1():
    """duffing1 written out as a custom system, so it is shot numerically."""
    return parse_system(
        {
            "name": "double-well",
            "hamiltonian": [[0, 2, 0.5], [2, 0, -0.5], [4, 0, 0.25]],
            "omega": 1.0,
            "perturbation": [{"component": 2, "harmonic": 1, "phase": "cos", "poly": [[0, 0, 1.0]]}],
            "saddles": [[0.0, 0.0]],
        }
    )


def _asymmetric_well():
    """Two saddles at different energies."""
    return parse_system(
        {
            "name": "tilted",
            "hamiltonian": [[0, 2, 0.5], [2, 0, 0.5], [3, 0, 0.05], [4, 0, -0.25]],
            "omega": 1.0,
            "saddles": [[-0.93, 0.0], [1.08, 0.0]],
        }
    )


# ── Closed form ────────────────────────────────────────────────────────────


@pytest.mark.parametrize("preset,h", [("duffing1", 0.0), ("duffing2", 0.25)])
def test_closed_form_lies_on_level_set(preset, h):
    orbit = closed_form_orbit(preset)
    assert orbit.energy == pytest.approx(h)
    assert np.max(orbit_energy_error(orbit, T_CHECK)) < 1e-14


def test_closed_form_endpoints():
    d1 = closed_form_orbit("duffing1")
    assert d1.homoclinic
    np.testing.assert_allclose(orbit_state(d1, 30.0), [0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(orbit_state(d1, 0.0), [np.sqrt(2.0), 0.0])
    d2 = closed_form_orbit("duffing2", branch=-1)
    assert not d2.homoclinic
    np.testing.assert_allclose(d2.source.x, [1.0, 0.0])
    np.testing.assert_allclose(orbit_state(d2, -40.0), [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(orbit_state(d2, 40.0), [-1.0, 0.0], atol=1e-12)
    assert d2.orbit_id == "duffing2:-"


def test_closed_form_accepts_complex_time():
    x = closed_form_state("duffing1", 1, 0.3 + 0.2j)
    assert np.iscomplexobj(x)
    h = build_preset("duffing1").energy(x)
    assert abs(h) < 1e-14


def test_orbit_eval_velocity_is_the_field():
    orbit = closed_form_orbit("duffing2")
    p = orbit_eval(orbit, 0.7)
    eps = 1e-6
    fd = (orbit_state(orbit, 0.7 + eps) - orbit_state(orbit, 0.7 - eps)) / (2 * eps)
    np.testing.assert_allclose(p.xdot, fd, atol=1e-8)


def test_shift_orbit_relabels_time():
    orbit = closed_form_orbit("duffing1")
    moved = shift_orbit(orbit, 0.8)
    np.testing.assert_allclose(orbit_state(moved, 1.3), orbit_state(orbit, 0.5))


def test_export_grid_columns():
    df = export_grid(closed_form_orbit("duffing2"), n=101)
    assert list(df.columns) == ["t", "x1", "x2", "dx1", "dx2", "H_error"]
    assert len(df) == 101
    assert df["H_error"].max() < 1e-14


# ── Shooting ───────────────────────────────────────────────────────────────


def test_shot_homoclinic_matches_closed_form():
    orbit = find_orbit(_custom_duffing1())
    assert orbit.kind == "numeric"
    assert orbit.homoclinic
    err = np.max(np.abs(orbit_state(orbit, T_CHECK) - closed_form_state("duffing1", 1, T_CHECK)))
    assert err < 1e-6


def test_shot_heteroclinic_matches_closed_form():
    sys = build_preset("duffing2")
    orbit = find_orbit(sys, method="numeric")
    err = np.max(np.abs(orbit_state(orbit, T_CHECK) - closed_form_state("duffing2", 1, T_CHECK)))
    assert err < 1e-6
    assert np.max(orbit_energy_error(orbit, np.linspace(-30.0, 30.0, 301))) < 1e-8


def test_shot_mirror_branch():
    sys = build_preset("duffing2")
    orbit = find_orbit(sys, branch=-1, method="numeric")
    np.testing.assert_allclose(orbit.source.x, [1.0, 0.0], atol=1e-12)
    err = np.max(np.abs(orbit_state(orbit, T_CHECK) - closed_form_state("duffing2", -1, T_CHECK)))
    assert err < 1e-6


def test_find_orbit_prefers_closed_form_for_presets():
    assert find_orbit(build_preset("duffing1")).kind == "closed_form"


def test_preset_name_alone_does_not_select_closed_form():
    # a custom system borrowing a preset's name, with a loop reaching x1 = 1
    sys = parse_system(
        {
            "name": "duffing1",
            "hamiltonian": [[0, 2, 0.5], [2, 0, -0.5], [4, 0, 0.5]],
            "omega": 1.0,
            "saddles": [[0.0, 0.0]],
        }
    )
    assert sys.preset is None
    orbit = find_orbit(sys)
    assert orbit.kind == "numeric"
    assert np.max(orbit_state(orbit, T_CHECK)[0]) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(NotClosedForm):
        find_orbit(sys, method="closed_form")


def test_shot_orbit_decays_at_the_saddle_rate():
    orbit = find_orbit(_custom_duffing1())
    d = np.linalg.norm(orbit_state(orbit, np.array([-6.0, -4.0, 4.0, 6.0])) - orbit.source.x[:, None], axis=0)
    lam = orbit.source.lam
    assert np.log(d[1] / d[0]) / 2.0 == pytest.approx(lam, rel=0.05)
    assert np.log(d[2] / d[3]) / 2.0 == pytest.approx(lam, rel=0.05)


def test_shooting_is_bitwise_reproducible():
    a = find_orbit(_custom_duffing1())
    b = find_orbit(_custom_duffing1())
    np.testing.assert_array_equal(orbit_state(a, T_CHECK), orbit_state(b, T_CHECK))
    np.testing.assert_array_equal(a.source.x, b.source.x)


def test_find_orbit_errors():
    with pytest.raises(NotClosedForm):
        find_orbit(_custom_duffing1(), method="closed_form")
    bare = parse_system({"hamiltonian": [[0, 2, 0.5], [2, 0, -0.5], [4, 0, 0.25]], "omega": 1.0})
    with pytest.raises(SchemaError):
        find_orbit(bare)


def test_energy_mismatch():
    sys = _asymmetric_well()
    left = refine_saddle(sys, [-0.93, 0.0])
    right = refine_saddle(sys, [1.08, 0.0])
    with pytest.raises(EnergyMismatch):
        shoot_separatrix(sys, left, right)


def test_endpoint_must_be_equilibrium():
    sys = build_preset("duffing1")
    origin = refine_saddle(sys, [0.0, 0.0])
    fake = Saddle(x=np.array([0.5, 0.0]), lam=1.0, v_u=origin.v_u, v_s=origin.v_s, hessian=origin.hessian)
    with pytest.raises(PreconditionError):
        shoot_separatrix(sys, origin, fake)


def test_no_arrival_within_max_time():
    sys = build_preset("duffing1")
    origin = refine_saddle(sys, [0.0, 0.0])
    with pytest.raises(NoConnection):
        shoot_separatrix(sys, origin, origin, max_time=5.0)
