"""Shared domain types and validation used by every other module.

Class ids are dense integers 0..C-1 internally; external label vocabularies
are remapped at ingestion (see ingest). Argmax ties break to the lowest
class index so runs are reproducible. All types here are immutable after
construction and safe to share across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """One univariate series of length N with optional label and prediction.

    Deliberately NOT validated on construction: validate_dataset reports
    invariant breaches (non-finite values, short series, bad labels) instead
    of making broken instances unrepresentable, so ingestion diagnostics can
    describe exactly what is wrong.
    """

    id: str | int
    values: np.ndarray
    label: int | None = None
    predicted_class: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen_array(self.values))

    @property
    def length(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class Dataset:
    """A named collection of equal-length series over dense classes 0..C-1.

    label_mapping records the original label vocabulary (raw token -> dense
    id) when the dataset came from a file; synthetic datasets leave it None.
    """

    name: str
    n_classes: int
    series_length: int
    instances: tuple[TimeSeries, ...]
    class_counts: tuple[int, ...]
    label_mapping: dict[str, int] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "class_counts", tuple(self.class_counts))

    @staticmethod
    def from_instances(
        name: str,
        n_classes: int,
        instances: list[TimeSeries] | tuple[TimeSeries, ...],
        label_mapping: dict[str, int] | None = None,
    ) -> "Dataset":
        """Build a Dataset, deriving series_length and class_counts."""
        instances = tuple(instances)
        if not instances:
            raise ValueError("dataset needs at least one instance")
        length = instances[0].length
        counts = [0] * n_classes
        for ts in instances:
            if ts.label is not None and 0 <= ts.label < n_classes:
                counts[ts.label] += 1
        return Dataset(
            name=name,
            n_classes=n_classes,
            series_length=length,
            instances=instances,
            class_counts=tuple(counts),
            label_mapping=label_mapping,
        )


@dataclass(frozen=True)
class AttributionVector:
    """Per-time-point relevance scores explaining one prediction.

    scores[i] quantifies the importance of time point i for the predictor's
    probability of target_class on the referenced series.
    """

    series_id: str | int
    method: str
    target_class: int
    scores: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.scores)
        if arr.ndim != 1 or arr.shape[0] == 0:
            raise ValueError("scores must be a nonempty 1-d vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError(
                f"attribution for series {self.series_id!r}: non-finite score"
            )
        object.__setattr__(self, "scores", arr)


@dataclass(frozen=True)
class ProbVector:
    """A probability distribution over the C classes."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.probs)
        if arr.ndim != 1 or arr.shape[0] == 0:
            raise ValueError("probs must be a nonempty 1-d vector")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError(f"probabilities outside [0, 1]: {arr}")
        if abs(float(arr.sum()) - 1.0) > 1e-6:
            raise ValueError(f"probabilities sum to {arr.sum()}, not 1")
        object.__setattr__(self, "probs", arr)


def predicted_class(p: ProbVector | np.ndarray | list[float]) -> int:
    """Index of the maximal probability; ties break to the lowest index."""
    arr = p.probs if isinstance(p, ProbVector) else np.asarray(p, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("empty probability vector")
    return int(np.argmax(arr))


def validate_dataset(d: Dataset) -> list[str]:
    """Report every invariant breach; empty list iff the dataset is valid.

    Never raises: this is the diagnostic surface for ingestion problems.
    Each violation names the instance id (or "dataset") and the broken rule.
    """
    violations: list[str] = []
    if d.n_classes < 2:
        violations.append(f"dataset: n_classes must be >= 2, got {d.n_classes}")
    if d.series_length < 2:
        violations.append(
            f"dataset: series_length must be >= 2, got {d.series_length}"
        )
    if len(d.class_counts) != d.n_classes:
        violations.append(
            f"dataset: class_counts has {len(d.class_counts)} entries "
            f"for {d.n_classes} classes"
        )
    if sum(d.class_counts) != len(d.instances):
        violations.append(
            f"dataset: class_counts sums to {sum(d.class_counts)} "
            f"but there are {len(d.instances)} instances"
        )
    seen_labels: set[int] = set()
    for ts in d.instances:
        if ts.length != d.series_length:
            violations.append(
                f"instance {ts.id}: length mismatch "
                f"(expected {d.series_length}, got {ts.length})"
            )
        if not np.all(np.isfinite(ts.values)):
            violations.append(f"instance {ts.id}: non-finite value")
        for name, value in (("label", ts.label), ("predicted_class", ts.predicted_class)):
            if value is not None and not (0 <= value < d.n_classes):
                violations.append(
                    f"instance {ts.id}: {name} {value} outside [0, {d.n_classes})"
                )
        if ts.label is not None:
            seen_labels.add(ts.label)
    if seen_labels and seen_labels != set(range(d.n_classes)):
        missing = sorted(set(range(d.n_classes)) - seen_labels)
        if missing:
            violations.append(
                f"dataset: classes without labeled instances: {missing}"
            )
    return violations
