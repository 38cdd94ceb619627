"""Result emission: tidy csv tables plus a JSON mirror and a run manifest.

All tables are long-format so one schema serves score tables, per-class
distributions, and curve plots; pivoting is left to plotting tools.
Real-valued columns are rendered with 6 fixed decimals (nan as "nan") so
re-runs diff cleanly; every csv starts with a comment line carrying the
config hash that produced it. The manifest is the only emitted file with
timestamps, so it is the only one exempt from byte-identity across
reruns.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from ._version import __version__
from .errors import DataError
from .metrics import AggregateCell, DegradationRecord, PerturbationCurve

SUMMARY_COLUMNS = (
    "dataset,predictor,method,strategy,n,mean_ds,class_id,class_mean_ds,"
    "delta,alpha,ds_c"
)
DISTRIBUTION_COLUMNS = "series_id,predicted_class,method,strategy,ds"
CURVE_COLUMNS = (
    "series_id,predicted_class,method,strategy,direction,step_index,"
    "fraction_perturbed,prob"
)


def fmt6(value: float) -> str:
    """Fixed 6-decimal rendering; nan renders as 'nan'."""
    return f"{float(value):.6f}"


def config_hash(config: dict) -> str:
    """Stable digest of a config: sha256 over its canonical JSON form
    (sorted keys, no whitespace)."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Provenance record for one evaluation run."""

    config_hash: str
    seed: int
    dataset_name: str
    predictor: str
    strategies: tuple[str, ...]
    methods: tuple[str, ...]
    alphas: tuple[float, ...]
    started_at: str
    finished_at: str
    tool_version: str = __version__

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _open_table(path: str | Path, cfg_hash: str, header: str):
    """Open a csv for writing: hash comment line, then the header. Fields
    containing separators get standard csv quoting, so fixed-format values
    (fmt6, ints, strategy tokens) are emitted byte-stable while free-text
    fields (dataset, predictor description) stay safe to parse."""
    fh = open(path, "w", encoding="utf-8", newline="")
    fh.write(f"# config_hash={cfg_hash}\n")
    fh.write(header + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    return fh, writer


def summary_rows(
    cells: list[AggregateCell], dataset: str, predictor: str
) -> list[dict]:
    """Long-format summary: one row per (cell x present class x alpha)."""
    if not cells:
        raise DataError("no aggregate cells to report")
    rows = []
    for cell in cells:
        for class_id in sorted(cell.per_class_mean_ds):
            for alpha, ds_c in cell.ds_c_by_alpha.items():
                rows.append(
                    {
                        "dataset": dataset,
                        "predictor": predictor,
                        "method": cell.method,
                        "strategy": cell.strategy,
                        "n": cell.n,
                        "mean_ds": cell.mean_ds,
                        "class_id": class_id,
                        "class_mean_ds": cell.per_class_mean_ds[class_id],
                        "delta": cell.delta,
                        "alpha": alpha,
                        "ds_c": ds_c,
                    }
                )
    return rows


def emit_summary(
    cells: list[AggregateCell],
    path: str | Path,
    dataset: str,
    predictor: str,
    cfg_hash: str,
) -> None:
    rows = summary_rows(cells, dataset, predictor)
    fh, writer = _open_table(path, cfg_hash, SUMMARY_COLUMNS)
    with fh:
        for row in rows:
            writer.writerow(
                [
                    row["dataset"],
                    row["predictor"],
                    row["method"],
                    row["strategy"],
                    str(row["n"]),
                    fmt6(row["mean_ds"]),
                    str(row["class_id"]),
                    fmt6(row["class_mean_ds"]),
                    fmt6(row["delta"]),
                    fmt6(row["alpha"]),
                    fmt6(row["ds_c"]),
                ]
            )


def emit_summary_json(
    cells: list[AggregateCell],
    path: str | Path,
    dataset: str,
    predictor: str,
    cfg_hash: str,
) -> None:
    """JSON mirror of the summary table: same fields, one object per row,
    numbers rounded to the same 6 decimals, nan as null."""

    def as_number(value: float):
        return None if math.isnan(value) else float(fmt6(value))

    rows = []
    for row in summary_rows(cells, dataset, predictor):
        rows.append(
            {
                key: (
                    as_number(value)
                    if key in ("mean_ds", "class_mean_ds", "delta", "alpha", "ds_c")
                    else value
                )
                for key, value in row.items()
            }
        )
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"config_hash": cfg_hash, "rows": rows}, fh, indent=2)
        fh.write("\n")


def emit_distributions(
    records: list[DegradationRecord], path: str | Path, cfg_hash: str
) -> None:
    """Per-instance scores, one row per record, for external histograms."""
    if not records:
        raise DataError("no degradation records to report")
    fh, writer = _open_table(path, cfg_hash, DISTRIBUTION_COLUMNS)
    with fh:
        for rec in records:
            writer.writerow(
                [
                    str(rec.series_id),
                    str(rec.predicted_class),
                    rec.method,
                    rec.strategy,
                    fmt6(rec.ds),
                ]
            )


def emit_curves(
    curves: list[PerturbationCurve], path: str | Path, cfg_hash: str
) -> None:
    """Curve points incl. the unperturbed step-0 row (fraction 0)."""
    if not curves:
        raise DataError("no perturbation curves to report")
    fh, writer = _open_table(path, cfg_hash, CURVE_COLUMNS)
    with fh:
        for curve in curves:
            prefix = [
                str(curve.series_id),
                str(curve.target_class),
                curve.method,
                curve.strategy,
                curve.direction,
            ]
            writer.writerow(prefix + ["0", fmt6(0.0), fmt6(curve.base_prob)])
            for j, k in enumerate(curve.cumulative_steps):
                fraction = k / curve.series_length
                writer.writerow(
                    prefix + [str(j + 1), fmt6(fraction), fmt6(curve.probs[j])]
                )
