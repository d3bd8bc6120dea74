"""Tests for melcert.report."""

import json
import math

import numpy as np
import pandas as pd
import pytest

from melcert.melnikov.certificate import INCONCLUSIVE, NON_INTEGRABLE
from melcert.models import Certificate, MelnikovSeries, MonodromyPair, SplittingPoint, ZeroPoint
from melcert.report import (
    convergence_summary,
    dumps,
    melnikov_table,
    monodromy_report,
    profile_table,
    series_from_report,
    series_report,
    to_jsonable,
    verdict_label,
    write_csv,
    write_json,
)


def _series() -> MelnikovSeries:
    return MelnikovSeries(
        n=1,
        coeffs=np.array([0.5j, -0.25, -0.5j]),
        err=np.array([1e-13, 2e-14, 1e-13]),
        omega=1.0,
        orbit_id="duffing1:+",
    )


def test_verdict_labels():
    assert verdict_label(NON_INTEGRABLE) == "non-integrable"
    assert verdict_label(INCONCLUSIVE) == "inconclusive"
    assert verdict_label(None) is None


def test_jsonable_handles_numpy_and_complex():
    data = to_jsonable({"a": np.float64(0.1), "b": np.arange(2), "c": 1 - 2j, "d": np.bool_(True), 3: math.inf})
    assert data == {"a": 0.1, "b": [0, 1], "c": {"re": 1.0, "im": -2.0}, "d": True, "3": "inf"}
    assert to_jsonable(float("nan")) == "nan"


def test_dumps_is_deterministic():
    a = dumps({"z": 1.0, "a": [0.1, 2j]})
    b = dumps({"a": [0.1, 2j], "z": 1.0})
    assert a == b
    assert a.endswith("\n")
    assert list(json.loads(a)) == ["a", "z"]


def test_series_report_roundtrip():
    series = _series()
    cert = Certificate(verdict=NON_INTEGRABLE, witness=1, margin=0.49, series=series)
    data = json.loads(dumps(series_report(series, cert, [ZeroPoint(theta=0.2526, slope=0.97, simple=True)])))
    assert data["verdict"] == "non-integrable"
    assert data["witness"] == 1
    assert [c["j"] for c in data["coeffs"]] == [-1, 0, 1]
    assert set(data["coeffs"][2]) == {"j", "re", "im", "err"}
    assert data["coeffs"][2]["re"] == series.coeff(1).real
    assert data["zeros"][0]["simple"] is True

    back = series_from_report(data)
    np.testing.assert_allclose(back.coeffs, series.coeffs, atol=1e-12)
    np.testing.assert_allclose(back.err, series.err, atol=1e-12)
    assert back.orbit_id == series.orbit_id
    assert back.n == 1


def test_series_report_without_certificate():
    data = series_report(_series())
    assert "verdict" not in data
    assert "zeros" not in data


def test_melnikov_table_inserts_zeros():
    series = _series()
    # M(θ) = −0.25 + sin θ
    theta0 = math.asin(0.25)
    df = melnikov_table(series, n_grid=16, zeros=[ZeroPoint(theta=theta0, slope=math.cos(theta0), simple=True)])
    assert len(df) == 17
    assert list(df.columns) == ["theta", "M", "zero", "simple"]
    assert df["theta"].is_monotonic_increasing
    row = df[df["zero"]].iloc[0]
    assert row["M"] == pytest.approx(0.0, abs=1e-12)
    assert df.loc[5, "M"] == pytest.approx(0.75)


def test_write_csv_uses_round_trip_floats(tmp_path):
    path = write_csv(pd.DataFrame({"x": [0.1, 1 / 3]}), tmp_path / "out" / "t.csv")
    lines = path.read_text().splitlines()
    assert lines == ["x", "0.1", repr(1 / 3)]


def test_write_json(tmp_path):
    path = write_json({"v": 1j}, tmp_path / "a" / "b.json")
    assert json.loads(path.read_text()) == {"v": {"re": 0.0, "im": 1.0}}


def test_monodromy_report():
    m = np.eye(3, dtype=complex)
    pair = MonodromyPair(ell=1, lam_plus=1.0, lam_minus=1.0, M_plus=m, M_minus=m, commutator_norm=0.0, verdict=INCONCLUSIVE)
    data = json.loads(dumps(monodromy_report(pair, {"preset": "duffing1"})))
    assert data["verdict"] == "inconclusive"
    assert data["preset"] == "duffing1"
    assert data["M_plus"][2][2] == {"re": 1.0, "im": 0.0}


def test_profile_table_columns():
    points = [SplittingPoint(theta=0.0, d=1e-3, d_scaled=1.0, m_theta=0.9)]
    df = profile_table(points, eps=1e-3)
    assert list(df.columns) == ["eps", "theta", "d", "d_scaled", "M_theta", "abs_err"]
    assert df.loc[0, "abs_err"] == pytest.approx(0.1)


def test_convergence_summary_order():
    summary = convergence_summary([1e-2, 1e-3, 1e-4], [4e-2, 4e-3, 4e-4])
    assert summary["fitted_order"] == pytest.approx(1.0)
    assert len(summary["errors"]) == 3
    assert convergence_summary([1e-2], [1e-3])["fitted_order"] is None
