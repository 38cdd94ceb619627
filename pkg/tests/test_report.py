import json
import math

import pytest

from tsape import (
    LERF,
    MORF,
    DataError,
    RunManifest,
    aggregate,
    config_hash,
    emit_curves,
    emit_distributions,
    emit_summary,
    emit_summary_json,
    fmt6,
    summary_rows,
)

from test_metrics import curve, record


def sample_cells():
    records = [
        record(0.5, cls=0),
        record(0.75, cls=0),
        record(0.25, cls=1),
        record(0.125, cls=1),
    ]
    return [aggregate(records, alphas=(0.0, 1.0))]


# --- formatting primitives ----------------------------------------------


def test_fmt6_fixed_decimals():
    assert fmt6(0.5) == "0.500000"
    assert fmt6(-1.0) == "-1.000000"
    assert fmt6(1 / 3) == "0.333333"
    assert fmt6(float("nan")) == "nan"
    assert fmt6(1e-9) == "0.000000"


def test_config_hash_is_key_order_invariant():
    a = {"dataset": "x.csv", "seed": 3, "alphas": [0.0, 1.0]}
    b = {"alphas": [0.0, 1.0], "seed": 3, "dataset": "x.csv"}
    assert config_hash(a) == config_hash(b)
    assert len(config_hash(a)) == 64
    c = dict(a, seed=4)
    assert config_hash(c) != config_hash(a)


# --- summary ------------------------------------------------------------


def test_summary_rows_cover_cells_classes_alphas():
    rows = summary_rows(sample_cells(), dataset="d", predictor="p")
    assert len(rows) == 4  # 1 cell x 2 classes x 2 alphas
    assert [r["class_id"] for r in rows] == [0, 0, 1, 1]
    assert [r["alpha"] for r in rows] == [0.0, 1.0, 0.0, 1.0]
    for r in rows:
        assert r["dataset"] == "d" and r["predictor"] == "p"
        if r["alpha"] == 0.0:
            assert r["ds_c"] == r["mean_ds"]


def test_emit_summary_layout(tmp_path):
    path = tmp_path / "summary.csv"
    emit_summary(sample_cells(), path, dataset="d", predictor="p", cfg_hash="abc123")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# config_hash=abc123"
    assert lines[1] == (
        "dataset,predictor,method,strategy,n,mean_ds,class_id,class_mean_ds,delta,alpha,ds_c"
    )
    assert len(lines) == 2 + 4
    first = lines[2].split(",")
    assert first[:5] == ["d", "p", "FO", "zero", "4"]
    assert first[5] == "0.406250"  # mean of the four dyadic scores, exact
    assert first[7] == "0.625000"  # class-0 mean


def test_emit_summary_quotes_fields_with_commas(tmp_path):
    path = tmp_path / "summary.csv"
    emit_summary(
        sample_cells(), path, dataset="d", predictor="centroid(classes=2, tau=0.05)",
        cfg_hash="abc",
    )
    import csv

    with open(path, encoding="utf-8") as fh:
        fh.readline()  # comment line
        rows = list(csv.reader(fh))
    assert rows[1][1] == "centroid(classes=2, tau=0.05)"
    assert len(rows[1]) == 11


def test_emit_summary_byte_stable(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_summary(sample_cells(), a, dataset="d", predictor="p", cfg_hash="h")
    emit_summary(sample_cells(), b, dataset="d", predictor="p", cfg_hash="h")
    assert a.read_bytes() == b.read_bytes()


def test_emit_summary_rejects_empty(tmp_path):
    with pytest.raises(DataError):
        emit_summary([], tmp_path / "s.csv", dataset="d", predictor="p", cfg_hash="h")


def test_summary_json_mirrors_csv_rounding(tmp_path):
    path = tmp_path / "summary.json"
    emit_summary_json(sample_cells(), path, dataset="d", predictor="p", cfg_hash="hh")
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["config_hash"] == "hh"
    assert len(data["rows"]) == 4
    row = data["rows"][0]
    assert row["mean_ds"] == 0.40625
    assert row["class_id"] == 0
    assert row["n"] == 4


def test_summary_json_nan_becomes_null(tmp_path):
    cell = aggregate([record(0.5, cls=1)], alphas=(0.0, 1.0))  # single class: nan delta
    path = tmp_path / "summary.json"
    emit_summary_json([cell], path, dataset="d", predictor="p", cfg_hash="hh")
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["rows"][0]["delta"] is None
    assert data["rows"][1]["ds_c"] is None  # alpha=1 with nan delta
    assert data["rows"][0]["ds_c"] == 0.5  # alpha=0 ignores the nan


def test_summary_nan_renders_as_nan_text(tmp_path):
    cell = aggregate([record(0.5, cls=1)], alphas=(0.0, 1.0))
    path = tmp_path / "summary.csv"
    emit_summary([cell], path, dataset="d", predictor="p", cfg_hash="h")
    body = path.read_text(encoding="utf-8")
    assert ",nan," in body


# --- distributions ------------------------------------------------------


def test_emit_distributions_layout(tmp_path):
    path = tmp_path / "distributions.csv"
    records = [record(0.5, cls=0), record(-0.25, cls=1, series_id="b")]
    emit_distributions(records, path, cfg_hash="zz")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# config_hash=zz"
    assert lines[1] == "series_id,predicted_class,method,strategy,ds"
    assert lines[2] == "a,0,FO,zero,0.500000"
    assert lines[3] == "b,1,FO,zero,-0.250000"
    with pytest.raises(DataError):
        emit_distributions([], path, cfg_hash="zz")


def test_distributions_regroup_reproduces_class_means(tmp_path):
    from tsape import class_means

    records = [record(0.5, cls=0), record(0.25, cls=0), record(-0.125, cls=1)]
    path = tmp_path / "distributions.csv"
    emit_distributions(records, path, cfg_hash="zz")
    lines = path.read_text(encoding="utf-8").splitlines()[2:]
    parsed = {}
    for line in lines:
        sid, cls, _method, _strategy, ds = line.split(",")
        parsed.setdefault(int(cls), []).append(float(ds))
    per, _ = class_means(records)
    for cls, values in parsed.items():
        assert abs(sum(values) / len(values) - per[cls]) < 1e-12


# --- curves -------------------------------------------------------------


def test_emit_curves_layout(tmp_path):
    path = tmp_path / "curves.csv"
    c = curve([0.9, 0.7, 0.5], direction=MORF, base=0.95)
    emit_curves([c], path, cfg_hash="cc")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# config_hash=cc"
    assert lines[1] == (
        "series_id,predicted_class,method,strategy,direction,step_index,"
        "fraction_perturbed,prob"
    )
    assert len(lines) == 2 + 4  # step 0 plus m=3 steps
    assert lines[2] == "a,0,FO,zero,morf,0,0.000000,0.950000"
    # series_length is 6 in the helper, so step 1 covers 1/6 of the series
    assert lines[3] == f"a,0,FO,zero,morf,1,{1/6:.6f},0.900000"
    assert lines[5].endswith(",3,0.500000,0.500000")


def test_emit_curves_multiple_directions(tmp_path):
    path = tmp_path / "curves.csv"
    emit_curves([curve([0.9], MORF), curve([0.8], LERF)], path, cfg_hash="cc")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2 + 2 * 2
    assert any(",morf," in line for line in lines[2:])
    assert any(",lerf," in line for line in lines[2:])
    with pytest.raises(DataError):
        emit_curves([], path, cfg_hash="cc")


# --- manifest -----------------------------------------------------------


def test_manifest_round_trip(tmp_path):
    manifest = RunManifest(
        config_hash="h",
        seed=3,
        dataset_name="toy",
        predictor="p",
        strategies=("zero", "opp"),
        methods=("FO",),
        alphas=(0.0, 1.0),
        started_at="2026-08-19T00:00:00+00:00",
        finished_at="2026-08-19T00:00:05+00:00",
    )
    path = tmp_path / "manifest.json"
    manifest.save(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["config_hash"] == "h"
    assert data["seed"] == 3
    assert data["strategies"] == ["zero", "opp"]
    assert data["tool_version"]
