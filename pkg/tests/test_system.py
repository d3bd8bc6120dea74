"""Tests for melcert.system: presets, parser and saddle refinement."""

import json
import math

import numpy as np
import pytest

from melcert.errors import NoConvergence, NotASaddle, RealityViolation, SchemaError, UnknownPreset
from melcert.system.model import hamiltonian_field, refine_saddle, saddle_at
from melcert.system.parser import load_system, parse_system
from melcert.system.presets import PRESETS, build_preset, get_preset, threshold_ratio


def _custom_doc(**overrides) -> dict:
    doc = {
        "name": "double-well",
        "hamiltonian": [[0, 2, 0.5], [2, 0, -0.5], [4, 0, 0.25]],
        "omega": 2.0,
        "perturbation": [{"component": 2, "harmonic": 1, "phase": "sin", "poly": [[0, 0, 1.5]]}],
        "saddles": [[0.0, 0.0]],
    }
    doc.update(overrides)
    return doc


# ── Presets ────────────────────────────────────────────────────────────────


def test_presets_registered():
    assert set(PRESETS) == {"duffing1", "duffing2"}
    with pytest.raises(UnknownPreset):
        get_preset("nosuch")


def test_build_preset_defaults_and_params():
    sys = build_preset("duffing2")
    assert sys.params == {"beta": 1.0, "delta": 0.0, "omega": 1.0}
    assert sys.name == "duffing2"
    sys = build_preset("duffing1", beta=2.0, delta=0.5, omega=3.0)
    assert sys.omega == 3.0
    x = np.array([0.3, 0.4])
    np.testing.assert_allclose(sys.g.evaluate(x, 0.0), [0.0, 2.0 - 0.5 * 0.4])
    np.testing.assert_allclose(sys.g.evaluate(x, np.pi / 2), [0.0, -0.5 * 0.4], atol=1e-15)


@pytest.mark.parametrize("omega", [0.0, -1.0])
def test_build_preset_rejects_nonpositive_omega(omega):
    with pytest.raises(SchemaError):
        build_preset("duffing1", omega=omega)


def test_threshold_ratio_values():
    d2 = threshold_ratio("duffing2", 1.0)
    assert d2["derived"] == pytest.approx(2.0 / (3.0 * math.pi) * math.sinh(math.pi / math.sqrt(2.0)))
    assert d2["printed"] == d2["derived"]
    d1 = threshold_ratio("duffing1", 1.0)
    assert d1["derived"] == pytest.approx(2.0 * math.sqrt(2.0) / (3.0 * math.pi) * math.cosh(math.pi / 2.0))
    assert d1["printed"] == pytest.approx(4.0 / math.pi * math.cosh(math.pi / 2.0))


# ── Saddles ────────────────────────────────────────────────────────────────


def test_duffing1_saddle_at_origin():
    sys = build_preset("duffing1")
    sad = refine_saddle(sys, [0.01, -0.02])
    np.testing.assert_allclose(sad.x, [0.0, 0.0], atol=1e-12)
    assert sad.lam == pytest.approx(1.0)
    np.testing.assert_allclose(sys.jacobian_at(sad.x) @ sad.v_u, sad.lam * sad.v_u, atol=1e-12)
    np.testing.assert_allclose(sys.jacobian_at(sad.x) @ sad.v_s, -sad.lam * sad.v_s, atol=1e-12)


def test_duffing2_lambda_from_hessian():
    sys = build_preset("duffing2")
    for guess in ([-1.0, 0.0], [1.0, 0.0]):
        sad = refine_saddle(sys, guess)
        assert sad.lam == pytest.approx(math.sqrt(2.0), rel=1e-14)
        assert np.linalg.det(sad.hessian) < 0.0


def test_center_is_not_a_saddle():
    sys = build_preset("duffing1")
    with pytest.raises(NotASaddle):
        saddle_at(sys, [1.0, 0.0])


def test_newton_failure_reported():
    sys = build_preset("duffing1")
    with pytest.raises(NoConvergence):
        refine_saddle(sys, [0.3, 0.2], max_iter=1)


def test_hamiltonian_field_is_symplectic_gradient():
    sys = build_preset("duffing2")
    x = [0.5, 0.25]
    h1, h2 = sys.gradient_at(x)
    np.testing.assert_allclose(hamiltonian_field(sys, x), [h2, -h1])


# ── Parser ─────────────────────────────────────────────────────────────────


def test_parse_custom_system():
    sys = parse_system(_custom_doc())
    assert sys.name == "double-well"
    assert sys.omega == 2.0
    assert sys.saddle_guesses == ((0.0, 0.0),)
    np.testing.assert_allclose(sys.g.evaluate(np.zeros(2), np.pi / 2), [0.0, 1.5])


def test_parse_preset_document():
    sys = parse_system({"preset": "duffing2", "params": {"beta": 0.5, "delta": 1.0}})
    assert sys.name == "duffing2"
    assert sys.params["beta"] == 0.5
    assert sys.params["omega"] == 1.0


def test_parse_explicit_complex_coefficients():
    hat = [
        {"component": 1, "harmonic": 1, "poly": [[0, 0, 0.0, -0.5]]},
        {"component": 1, "harmonic": -1, "poly": [[0, 0, 0.0, 0.5]]},
    ]
    sys = parse_system(_custom_doc(perturbation=[], perturbation_hat=hat))
    np.testing.assert_allclose(sys.g.evaluate(np.zeros(2), np.pi / 2), [1.0, 0.0], atol=1e-15)


def test_parse_rejects_nonconjugate_coefficients():
    hat = [{"component": 1, "harmonic": 1, "poly": [[0, 0, 1.0, 0.0]]}]
    with pytest.raises(RealityViolation):
        parse_system(_custom_doc(perturbation=[], perturbation_hat=hat))


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"omega": 1.0},
        _custom_doc(omega=0.0),
        _custom_doc(omega="fast"),
        _custom_doc(hamiltonian=[[0, 2, 0.5, 1.0]]),
        _custom_doc(hamiltonian="x^2"),
        _custom_doc(saddles=[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]),
        _custom_doc(perturbation=[{"component": 2, "harmonic": 1}]),
        {"preset": "duffing1", "params": {"gamma": 1.0}},
    ],
)
def test_parse_schema_errors(doc):
    with pytest.raises(SchemaError):
        parse_system(doc)


def test_parse_unknown_preset():
    with pytest.raises(UnknownPreset):
        parse_system({"preset": "nosuch"})


def test_load_system_from_file(tmp_path):
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(_custom_doc()))
    assert load_system(path).name == "double-well"


def test_load_system_bad_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SchemaError):
        load_system(bad)
    with pytest.raises(SchemaError):
        load_system(tmp_path / "missing.json")
