import json
import math

import numpy as np
import pytest

from experiments.export import export, load_result
from experiments.peaks import find_peaks
from experiments.runner import SweepResult


def sweep(xs, ys, name="fidelity") -> SweepResult:
    rows = [{"x": float(x), name: float(y), "status": "ok"} for x, y in zip(xs, ys)]
    return SweepResult(columns=["x", name, "status"], rows=rows, metadata={"scenario": {"name": "synthetic"}})


def test_parabolic_refinement():
    xs = np.arange(0.0, 1.5, 0.05)
    result = sweep(xs, 1 - (xs - 0.73) ** 2)
    peaks = find_peaks(result, "fidelity")
    assert len(peaks) == 1
    assert peaks[0].axis_value == pytest.approx(0.73, abs=1e-9)
    assert peaks[0].height == pytest.approx(1.0, abs=1e-9)


def test_maxima_and_minima():
    xs = np.linspace(0.0, 2.0, 41)
    result = sweep(xs, np.cos(2 * np.pi * xs))
    maxima = find_peaks(result, "fidelity")
    assert [round(p.axis_value, 6) for p in maxima] == [1.0]
    minima = find_peaks(result, "fidelity", minima=True)
    assert [round(p.axis_value, 3) for p in minima] == [0.5, 1.5]
    assert all(p.height == pytest.approx(-1.0, abs=1e-2) for p in minima)


def test_min_height_filter():
    xs = np.linspace(0.0, 2.0, 81)
    ys = np.exp(-((xs - 0.5) / 0.1) ** 2) + 0.5 * np.exp(-((xs - 1.5) / 0.1) ** 2)
    result = sweep(xs, ys)
    assert len(find_peaks(result, "fidelity")) == 2
    tall = find_peaks(result, "fidelity", min_height=0.9)
    assert len(tall) == 1 and tall[0].axis_value == pytest.approx(0.5, abs=0.01)


def test_monotone_column_has_no_peaks():
    xs = np.linspace(0.0, 1.0, 11)
    assert find_peaks(sweep(xs, xs), "fidelity") == []


def test_failed_rows_never_peak():
    xs = np.linspace(0.0, 1.0, 5)
    ys = [0.1, 0.5, math.nan, 0.4, 0.2]
    assert find_peaks(sweep(xs, ys), "fidelity") == []


def test_flat_top_resolves_to_first_sample():
    peaks = find_peaks(sweep([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 1.0, 0.0]), "fidelity")
    assert [p.index for p in peaks] == [1]
    assert peaks[0].axis_value == pytest.approx(1.5)
    assert peaks[0].height == pytest.approx(1.125)


def test_peaks_need_three_rows():
    with pytest.raises(ValueError):
        find_peaks(sweep([0.0, 1.0], [0.2, 0.3]), "fidelity")


def test_csv_round_trip(tmp_path):
    xs = np.linspace(0.0, 1.0, 6)
    result = sweep(xs, np.sin(xs))
    result.rows[3]["fidelity"] = math.nan
    result.rows[3]["status"] = "error: IntegrationError: budget exhausted"
    path = export(result, tmp_path / "nested" / "out.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "x,fidelity,status"
    assert len(lines) == 7
    loaded = load_result(path)
    assert loaded.columns == result.columns
    assert loaded.column("fidelity")[1] == pytest.approx(math.sin(0.2), rel=1e-11)
    assert math.isnan(loaded.column("fidelity")[3])
    assert loaded.rows[3]["status"].startswith("error")


def test_json_round_trip(tmp_path):
    result = sweep([0.0, 0.5], [0.25, math.nan])
    path = export(result, tmp_path / "out.json", "json")
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload["rows"][1]["fidelity"] is None
    assert payload["metadata"]["scenario"]["name"] == "synthetic"
    loaded = load_result(path)
    assert loaded.rows[0]["fidelity"] == 0.25
    assert math.isnan(loaded.rows[1]["fidelity"])


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        export(sweep([0.0], [1.0]), tmp_path / "out.xlsx", "xlsx")
