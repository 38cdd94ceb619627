"""Dataset loading, label remapping, stratified sampling, z-norm checks.

File formats:
    ucr-tsv  UTF-8, one instance per line, tab-separated, first field the
             label token, remaining N fields decimal reals.
    csv      same layout comma-separated, with an optional header line
             "label,t0,...,t{N-1}".

Variable-length rows are rejected rather than padded. Standard deviation is
the population convention (divide by N) throughout. The z-normalization
check only reports; it never mutates data.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Dataset, TimeSeries
from .errors import DataError, ParseError
from .rng import SplitMix64

log = logging.getLogger(__name__)

_SEPARATORS = {"ucr-tsv": "\t", "csv": ","}


@dataclass(frozen=True)
class SamplingSpec:
    """Stratified sampling target: up to per_class instances per class."""

    per_class: int
    seed: int

    def __post_init__(self) -> None:
        if self.per_class < 1:
            raise DataError(f"per_class must be >= 1, got {self.per_class}")


def remap_labels(raw_labels: list[str]) -> tuple[dict[str, int], list[int]]:
    """Map raw label tokens onto dense ids 0..C-1, preserving order.

    Distinct tokens are sorted numerically when every token parses as a
    number, lexicographically otherwise, then assigned 0..C-1 in that order.
    """
    distinct = sorted(set(raw_labels))
    if len(distinct) < 2:
        raise DataError(
            f"classification requires >= 2 distinct labels, got {distinct}"
        )
    try:
        distinct.sort(key=float)
    except ValueError:
        pass  # non-numeric vocabulary: keep the lexicographic order
    mapping = {token: i for i, token in enumerate(distinct)}
    return mapping, [mapping[token] for token in raw_labels]


def load_dataset(path: str | Path, format: str = "ucr-tsv") -> Dataset:
    """Load a dataset file; the dataset name is the file stem.

    Labels are remapped to dense 0..C-1 (remap_labels); the original
    vocabulary is recorded on the Dataset. Instance ids are the 0-based
    data-row indices, as strings.
    """
    if format not in _SEPARATORS:
        raise DataError(f"unknown dataset format {format!r}; expected ucr-tsv or csv")
    sep = _SEPARATORS[format]
    path = Path(path)
    if not path.is_file():
        raise DataError(f"dataset file not found: {path}")
    raw_labels: list[str] = []
    rows: list[list[float]] = []
    n_values: int | None = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip("\n").strip("\r")
            if not line.strip():
                continue
            fields = line.split(sep)
            if format == "csv" and line_no == 1 and fields[0].strip() == "label":
                continue  # optional header
            if len(fields) < 2:
                raise ParseError(
                    f"{path.name}: row {line_no}: expected a label and at least "
                    f"one value, got {len(fields)} field(s)"
                )
            if n_values is None:
                n_values = len(fields) - 1
            elif len(fields) - 1 != n_values:
                raise ParseError(
                    f"{path.name}: row {line_no}: ragged row "
                    f"(expected {n_values} values, got {len(fields) - 1})"
                )
            values = []
            for col_no, token in enumerate(fields[1:], start=2):
                try:
                    value = float(token)
                except ValueError:
                    raise ParseError(
                        f"{path.name}: row {line_no}, column {col_no}: "
                        f"non-numeric value {token!r}"
                    ) from None
                if not math.isfinite(value):
                    raise ParseError(
                        f"{path.name}: row {line_no}, column {col_no}: "
                        f"non-finite value {token!r}"
                    )
                values.append(value)
            raw_labels.append(fields[0].strip())
            rows.append(values)
    if not rows:
        raise DataError(f"{path.name}: no data rows")
    mapping, dense = remap_labels(raw_labels)
    instances = [
        TimeSeries(id=str(i), values=row, label=dense[i])
        for i, row in enumerate(rows)
    ]
    return Dataset.from_instances(
        name=path.stem,
        n_classes=len(mapping),
        instances=instances,
        label_mapping=mapping,
    )


def save_dataset(d: Dataset, path: str | Path) -> None:
    """Write a dataset in the format matching the extension: '.tsv' gets the
    ucr-tsv layout (tab-separated, no header), anything else csv with the
    standard header, so the written file loads back under the format a
    config would infer from its name.

    Values are written in shortest round-tripping form, so a load of the
    written file reproduces the values exactly. Labels are written as their
    dense ids.
    """
    path = Path(path)
    sep = "\t" if path.suffix == ".tsv" else ","
    with open(path, "w", encoding="utf-8") as fh:
        if sep == ",":
            header = ",".join(["label"] + [f"t{i}" for i in range(d.series_length)])
            fh.write(header + "\n")
        for ts in d.instances:
            if ts.label is None:
                raise DataError(f"instance {ts.id}: cannot write unlabeled instance")
            fh.write(sep.join([str(ts.label)] + [repr(float(v)) for v in ts.values]) + "\n")


def stratified_sample(d: Dataset, spec: SamplingSpec) -> Dataset:
    """Draw up to per_class instances per class, without replacement.

    Draws use a single tsape-rng v1 stream seeded with spec.seed: classes
    are visited in ascending id order and each class's candidates (in
    dataset order) are drawn by partial Fisher-Yates. The output is ordered
    by (class, draw order). Classes with fewer than per_class instances are
    taken whole, with a logged warning.
    """
    if any(ts.label is None for ts in d.instances):
        raise DataError("stratified sampling requires labels on every instance")
    gen = SplitMix64(spec.seed)
    chosen: list[TimeSeries] = []
    for cls in range(d.n_classes):
        candidates = [ts for ts in d.instances if ts.label == cls]
        take = min(spec.per_class, len(candidates))
        if take < spec.per_class:
            log.warning(
                "class %d has only %d instances (< per_class %d); taking all",
                cls, len(candidates), spec.per_class,
            )
        pool = list(candidates)
        for j in range(take):
            swap = j + gen.below(len(pool) - j)
            pool[j], pool[swap] = pool[swap], pool[j]
        chosen.extend(pool[:take])
    return Dataset.from_instances(
        name=d.name,
        n_classes=d.n_classes,
        instances=chosen,
        label_mapping=d.label_mapping,
    )


@dataclass(frozen=True)
class ZnormRow:
    """Per-instance normalization report entry."""

    series_id: str | int
    mean: float
    std: float
    flagged: bool


def znorm_report(d: Dataset) -> list[ZnormRow]:
    """Report per-instance mean and population std; flag instances that are
    not approximately z-normalized (|mean| > 0.1 or |std - 1| > 0.1)."""
    rows = []
    for ts in d.instances:
        mean = float(np.mean(ts.values))
        std = float(np.std(ts.values))
        flagged = abs(mean) > 0.1 or abs(std - 1.0) > 0.1
        rows.append(ZnormRow(series_id=ts.id, mean=mean, std=std, flagged=flagged))
    return rows
