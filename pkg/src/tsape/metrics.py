"""Degradation metrics over perturbation curves.

The measurement chain per instance: rank time points by attribution score,
perturb the top-k (MoRF) or bottom-k (LeRF) points for each cumulative
step count, track the predicted-class probability, and score an
attribution by the mean gap between its LeRF and MoRF curves (ds).
Aggregation adds per-class means, a class-disparity penalty delta, and
the penalty-adjusted score ds_c(alpha) = mean_ds - alpha * delta.

Floating-point note: every curve value lives in [0,1], so ds = mean of
per-step differences is guaranteed inside [-1,1] even after rounding
(all partial sums stay under representable integer bounds). The
constructors enforce these ranges strictly, not with tolerances.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import AttributionVector, TimeSeries, _frozen_array
from .errors import ConfigError, DataError
from .perturb import (
    LERF,
    MORF,
    PerturbationSchedule,
    PerturbationStrategy,
    rank_features,
    replacement_series,
)
from .predict import Predictor
from .rng import derive_seed

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PerturbationCurve:
    """Probability of target_class after each cumulative perturbation step.

    probs[j] is the probability after cumulative_steps[j] points are
    replaced; the unperturbed probability is kept as base_prob metadata
    and is deliberately not part of the m-vector.
    """

    series_id: str | int
    strategy: str
    method: str
    direction: str
    target_class: int
    probs: np.ndarray
    cumulative_steps: tuple[int, ...]
    series_length: int
    base_prob: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", _frozen_array(self.probs))
        object.__setattr__(self, "cumulative_steps", tuple(self.cumulative_steps))
        if self.direction not in (MORF, LERF):
            raise ConfigError(f"direction must be {MORF!r} or {LERF!r}")
        if self.probs.ndim != 1 or self.probs.shape[0] != len(self.cumulative_steps):
            raise DataError("curve length must match the schedule's step count")
        if self.probs.shape[0] < 1:
            raise DataError("curve must contain at least one step")
        for name, value in (("base_prob", self.base_prob),) + tuple(
            (f"probs[{j}]", p) for j, p in enumerate(self.probs)
        ):
            if not (0.0 <= value <= 1.0):
                raise DataError(f"{name} = {value!r} outside [0, 1]")

    @property
    def m(self) -> int:
        return len(self.cumulative_steps)

    @property
    def fractions(self) -> np.ndarray:
        """Fraction of the series perturbed at each step."""
        return np.asarray(self.cumulative_steps, dtype=np.float64) / self.series_length


@dataclass(frozen=True)
class DegradationRecord:
    """Per-instance degradation score for one (method, strategy) pair."""

    series_id: str | int
    strategy: str
    method: str
    predicted_class: int
    ds: float

    def __post_init__(self) -> None:
        if not (-1.0 <= self.ds <= 1.0):
            raise DataError(f"ds = {self.ds!r} outside [-1, 1]")


def perturbation_curve(
    h: Predictor,
    x: TimeSeries,
    r: AttributionVector,
    strategy: PerturbationStrategy,
    schedule: PerturbationSchedule,
    direction: str,
    seed: int,
) -> PerturbationCurve:
    """Evaluate one direction's perturbation curve for one instance.

    The replacement vector is pure in (strategy, x, seed), so calling with
    MoRF and LeRF at the same seed perturbs toward identical values. All
    m+1 probe series (row 0 unperturbed) go to the predictor as one batch;
    every probe is rebuilt from the original values, never incrementally.
    """
    if x.predicted_class is None or r.target_class != x.predicted_class:
        raise DataError(
            f"attribution targets class {r.target_class} but series "
            f"{x.id!r} has predicted class {x.predicted_class}"
        )
    n = x.length
    if r.scores.shape[0] != n:
        raise DataError(
            f"attribution length {r.scores.shape[0]} does not match series length {n}"
        )
    if schedule.coverage_target > n:
        raise ConfigError(
            f"schedule covers {schedule.coverage_target} points but the series has {n}"
        )
    ranked = rank_features(r, direction)
    replacement = replacement_series(strategy, x, seed)
    values = x.values
    rows = np.repeat(values[None, :], schedule.m + 1, axis=0)
    for j, k in enumerate(schedule.cumulative_steps):
        idx = np.asarray(ranked.order[:k], dtype=np.int64)
        rows[j + 1, idx] = replacement[idx]
    try:
        probs = h.predict_proba(rows)[:, r.target_class]
    except Exception as exc:
        raise type(exc)(
            f"predictor failed on series {x.id!r} while evaluating the "
            f"{direction} curve (steps 1..{schedule.m}): {exc}"
        ) from exc
    return PerturbationCurve(
        series_id=x.id,
        strategy=strategy.name,
        method=r.method,
        direction=direction,
        target_class=r.target_class,
        probs=probs[1:],
        cumulative_steps=schedule.cumulative_steps,
        series_length=n,
        base_prob=float(probs[0]),
    )


def degradation_score(lerf: PerturbationCurve, morf: PerturbationCurve) -> DegradationRecord:
    """ds = mean over steps of (lerf - morf) probability.

    Positive values mean perturbing high-scored points first degrades the
    prediction faster, i.e. the attribution is informative. Argument order
    is (lerf, morf); swapping the arguments negates ds exactly.
    """
    if (
        lerf.series_id != morf.series_id
        or lerf.strategy != morf.strategy
        or lerf.method != morf.method
        or lerf.target_class != morf.target_class
        or lerf.cumulative_steps != morf.cumulative_steps
    ):
        raise DataError(
            "cannot score curves from different series, strategies, methods, "
            "classes, or schedules"
        )
    ds = float(np.mean(lerf.probs - morf.probs))
    return DegradationRecord(
        series_id=lerf.series_id,
        strategy=lerf.strategy,
        method=lerf.method,
        predicted_class=lerf.target_class,
        ds=ds,
    )


@dataclass(frozen=True)
class InstanceResult:
    """Both curves plus the score for one (instance, method, strategy)."""

    morf: PerturbationCurve
    lerf: PerturbationCurve
    record: DegradationRecord


def evaluate_instance(
    h: Predictor,
    x: TimeSeries,
    r: AttributionVector,
    strategy: PerturbationStrategy,
    schedule: PerturbationSchedule,
    global_seed: int,
) -> InstanceResult:
    """Run one instance end to end: shared replacement seed, both curves, ds.

    The per-instance seed mixes the run seed with the series id (tsape-rng
    v1 derivation), so results do not depend on instance order or worker
    scheduling.
    """
    seed = derive_seed(global_seed, x.id)
    morf = perturbation_curve(h, x, r, strategy, schedule, MORF, seed)
    lerf = perturbation_curve(h, x, r, strategy, schedule, LERF, seed)
    return InstanceResult(morf=morf, lerf=lerf, record=degradation_score(lerf, morf))


def class_means(records: list[DegradationRecord]) -> tuple[dict[int, float], float]:
    """Per-class mean ds over predicted classes present, plus the overall
    instance mean (NOT the mean of class means; they differ when counts
    are unbalanced)."""
    if not records:
        raise DataError("cannot average zero degradation records")
    by_class: dict[int, list[float]] = {}
    for rec in records:
        by_class.setdefault(rec.predicted_class, []).append(rec.ds)
    per_class = {
        c: float(np.mean(np.asarray(vals))) for c, vals in sorted(by_class.items())
    }
    overall = float(np.mean(np.asarray([rec.ds for rec in records])))
    return per_class, overall


def penalty(per_class_means: dict[int, float]) -> float:
    """Class-disparity penalty: half the mean absolute pairwise difference
    between per-class mean ds values, over the classes actually present.

    With exactly two classes this reduces to 0.5 * |d_0 - d_1| bit-for-bit
    because the pair count is 1.
    """
    classes = sorted(per_class_means)
    if len(classes) < 2:
        raise DataError(
            f"penalty needs at least 2 classes present, got {len(classes)}"
        )
    total = 0.0
    n_pairs = 0
    for i, ci in enumerate(classes):
        for cj in classes[i + 1 :]:
            total += abs(per_class_means[ci] - per_class_means[cj])
            n_pairs += 1
    return 0.5 * (total / n_pairs)


def class_adjusted_ds(mean_ds: float, delta: float, alpha: float) -> float:
    """Penalized score mean_ds - alpha * delta; alpha in [0,1] sets how hard
    class disparity is punished (0 = ignore, 1 = full penalty)."""
    if not (0.0 <= alpha <= 1.0):
        raise ConfigError(f"alpha must be in [0, 1], got {alpha}")
    if alpha == 0.0:
        # exact zero-penalty semantics, even when delta is nan
        return float(mean_ds)
    return float(mean_ds - alpha * delta)


@dataclass(frozen=True)
class AggregateCell:
    """Aggregate scores for one (method, strategy) cell of a run.

    delta is nan when fewer than two predicted classes are present (the
    disparity penalty is undefined); ds_c_by_alpha[0.0] always equals
    mean_ds regardless.
    """

    strategy: str
    method: str
    n: int
    mean_ds: float
    per_class_mean_ds: dict[int, float]
    delta: float
    ds_c_by_alpha: dict[float, float]
    n_per_class: dict[int, int]

    def __post_init__(self) -> None:
        if self.n < 1 or sum(self.n_per_class.values()) != self.n:
            raise DataError("per-class counts must sum to n >= 1")
        if sorted(self.per_class_mean_ds) != sorted(self.n_per_class):
            raise DataError("per-class means and counts must cover the same classes")
        if not math.isnan(self.delta) and self.delta < 0.0:
            raise DataError(f"delta = {self.delta!r} must be >= 0")
        for alpha in self.ds_c_by_alpha:
            if not (0.0 <= alpha <= 1.0):
                raise ConfigError(f"alpha must be in [0, 1], got {alpha}")

    @property
    def balanced_mean_ds(self) -> float:
        """Mean of per-class means: the imbalance-insensitive companion to
        the instance mean, equal to it on balanced samples."""
        return float(np.mean(np.asarray(sorted(self.per_class_mean_ds.values()))))


def aggregate(
    records: list[DegradationRecord], alphas: tuple[float, ...] = (0.0, 1.0)
) -> AggregateCell:
    """Reduce per-instance records for ONE (method, strategy) cell.

    Reduction order is fixed (records in given order, classes ascending),
    so repeated aggregation of the same records is bit-identical.
    """
    if not records:
        raise DataError("cannot aggregate zero degradation records")
    strategy = records[0].strategy
    method = records[0].method
    for rec in records:
        if rec.strategy != strategy or rec.method != method:
            raise DataError(
                "aggregate expects records from a single (method, strategy) cell; "
                f"got {method!r}/{strategy!r} and {rec.method!r}/{rec.strategy!r}"
            )
    per_class, overall = class_means(records)
    counts: dict[int, int] = {}
    for rec in records:
        counts[rec.predicted_class] = counts.get(rec.predicted_class, 0) + 1
    if len(per_class) >= 2:
        delta = penalty(per_class)
    else:
        delta = float("nan")
        log.warning(
            "only one predicted class present in %s/%s; class penalty undefined, "
            "reporting delta = nan",
            method,
            strategy,
        )
    ds_c = {float(a): class_adjusted_ds(overall, delta, float(a)) for a in alphas}
    return AggregateCell(
        strategy=strategy,
        method=method,
        n=len(records),
        mean_ds=overall,
        per_class_mean_ds=per_class,
        delta=delta,
        ds_c_by_alpha=ds_c,
        n_per_class=counts,
    )
