"""Attribution vectors: occlusion, finite-difference gradients, file import.

Both native methods treat the predictor as a black box and are
deterministic given a deterministic predictor. Scores are NOT normalized
here: downstream ranking is invariant to monotone rescaling, so metric
inputs stay raw.

Attribution file format (csv, UTF-8):
    header  series_id,method,target_class,r0,...,r{N-1}
    rows    one attribution vector per line, decimal reals
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import AttributionVector, Dataset, TimeSeries
from .errors import ConfigError, DataError, ParseError
from .predict import Predictor

OCCLUSION_METHOD = "FO"
FD_GRADIENT_METHOD = "GR-fd"
FD_GRADIENT_ABS_METHOD = "GR-fd-abs"


@dataclass(frozen=True)
class AttributionSource:
    """Configuration for one way of producing attribution vectors.

    kind             occlusion | fd-gradient | file
    occlusion_window window width w >= 1 (occlusion)
    occlusion_value  replacement value v (occlusion)
    fd_epsilon       central-difference step (fd-gradient)
    fd_abs           rank by gradient magnitude instead of signed value
    path             attribution csv (file)
    """

    kind: str
    occlusion_window: int = 1
    occlusion_value: float = 0.0
    fd_epsilon: float = 1e-3
    fd_abs: bool = False
    path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("occlusion", "fd-gradient", "file"):
            raise ConfigError(
                f"unknown attribution kind {self.kind!r}; "
                "expected occlusion, fd-gradient, or file"
            )
        if self.occlusion_window < 1:
            raise ConfigError(f"occlusion_window must be >= 1, got {self.occlusion_window}")
        if not math.isfinite(self.occlusion_value):
            raise ConfigError("occlusion_value must be finite")
        if self.fd_epsilon <= 0:
            raise ConfigError(f"fd_epsilon must be > 0, got {self.fd_epsilon}")
        if self.kind == "file" and not self.path:
            raise ConfigError("file attribution source requires a path")


def occlusion_attribution(
    h: Predictor, x: TimeSeries, c: int, w: int = 1, v: float = 0.0
) -> AttributionVector:
    """Score each time point by the probability drop when it is occluded.

    r_i = q_c(x) - q_c(x with the length-w window centered at i set to v).
    For even w the window extends one point further right of center; at the
    series bounds it is shortened, never padded.
    """
    if not (0 <= c < h.n_classes):
        raise DataError(f"target class {c} outside [0, {h.n_classes})")
    if w < 1:
        raise ConfigError(f"occlusion window must be >= 1, got {w}")
    if not math.isfinite(v):
        raise ConfigError(f"occlusion value must be finite, got {v}")
    values = x.values
    n = values.shape[0]
    half_lo = (w - 1) // 2
    half_hi = w // 2
    rows = np.repeat(values[None, :], n + 1, axis=0)
    for i in range(n):
        rows[i + 1, max(0, i - half_lo) : min(n, i + half_hi + 1)] = v
    probs = h.predict_proba(rows)[:, c]
    return AttributionVector(
        series_id=x.id,
        method=OCCLUSION_METHOD,
        target_class=c,
        scores=probs[0] - probs[1:],
    )


def fd_gradient_attribution(
    h: Predictor, x: TimeSeries, c: int, eps: float = 1e-3, abs_scores: bool = False
) -> AttributionVector:
    """Central-difference gradient of q_c at x, one coordinate at a time.

    r_i = (q_c(x + eps*e_i) - q_c(x - eps*e_i)) / (2*eps), signed by
    default; abs_scores ranks by magnitude instead and is reported under a
    distinct method name.
    """
    if not (0 <= c < h.n_classes):
        raise DataError(f"target class {c} outside [0, {h.n_classes})")
    if eps <= 0:
        raise ConfigError(f"eps must be > 0, got {eps}")
    values = x.values
    n = values.shape[0]
    rows = np.repeat(values[None, :], 2 * n, axis=0)
    rows[np.arange(n), np.arange(n)] += eps
    rows[n + np.arange(n), np.arange(n)] -= eps
    probs = h.predict_proba(rows)[:, c]
    scores = (probs[:n] - probs[n:]) / (2.0 * eps)
    if abs_scores:
        scores = np.abs(scores)
    return AttributionVector(
        series_id=x.id,
        method=FD_GRADIENT_ABS_METHOD if abs_scores else FD_GRADIENT_METHOD,
        target_class=c,
        scores=scores,
    )


def attribution_header(n: int) -> str:
    return ",".join(["series_id", "method", "target_class"] + [f"r{i}" for i in range(n)])


def save_attributions(vectors: list[AttributionVector], path: str | Path) -> None:
    """Write attribution vectors in the csv format above; values in shortest
    round-tripping form so a reload reproduces them exactly."""
    if not vectors:
        raise DataError("no attribution vectors to write")
    n = vectors[0].scores.shape[0]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(attribution_header(n) + "\n")
        for vec in vectors:
            if vec.scores.shape[0] != n:
                raise DataError(
                    f"attribution for series {vec.series_id!r} has length "
                    f"{vec.scores.shape[0]}, expected {n}"
                )
            fields = [str(vec.series_id), vec.method, str(vec.target_class)]
            fields += [repr(float(s)) for s in vec.scores]
            fh.write(",".join(fields) + "\n")


def load_attributions(path: str | Path, dataset: Dataset) -> list[AttributionVector]:
    """Parse an attribution csv against a dataset.

    Every row must name a series id present in the dataset, carry exactly N
    scores, and contain only finite values; failures name the offending row.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"attribution file not found: {path}")
    known_ids = {str(ts.id) for ts in dataset.instances}
    n = dataset.series_length
    expected_header = attribution_header(n)
    vectors: list[AttributionVector] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip("\n").strip("\r")
            if not line.strip():
                continue
            if line_no == 1:
                if line != expected_header:
                    raise ParseError(
                        f"{path.name}: row 1: header does not match "
                        f"{expected_header[:40]}... for series length {n}"
                    )
                continue
            fields = line.split(",")
            if len(fields) != n + 3:
                raise ParseError(
                    f"{path.name}: row {line_no}: expected {n} scores, "
                    f"got {len(fields) - 3}"
                )
            series_id, method, raw_class = fields[0], fields[1], fields[2]
            if series_id not in known_ids:
                raise ParseError(
                    f"{path.name}: row {line_no}: unknown series id {series_id!r}"
                )
            try:
                target_class = int(raw_class)
            except ValueError:
                raise ParseError(
                    f"{path.name}: row {line_no}: bad target_class {raw_class!r}"
                ) from None
            if not (0 <= target_class < dataset.n_classes):
                raise ParseError(
                    f"{path.name}: row {line_no}: target_class {target_class} "
                    f"outside [0, {dataset.n_classes})"
                )
            try:
                scores = [float(tok) for tok in fields[3:]]
            except ValueError:
                raise ParseError(
                    f"{path.name}: row {line_no}: non-numeric score"
                ) from None
            if not all(math.isfinite(s) for s in scores):
                raise ParseError(f"{path.name}: row {line_no}: non-finite score")
            vectors.append(
                AttributionVector(
                    series_id=series_id,
                    method=method,
                    target_class=target_class,
                    scores=scores,
                )
            )
    if not vectors:
        raise DataError(f"{path.name}: no attribution rows")
    return vectors
