"""Perturbation strategies, feature ranking, and the incremental schedule.

Replacement values always derive from the ORIGINAL series, never from a
partially perturbed one, so the replacement vector for an instance is fixed
up front and shared between the MoRF and LeRF runs. That makes the
degradation score reflect ordering quality only, not sampling noise.

Strategy tokens accepted in configs and on the CLI:
    gauss, unif, opp, inv, submean, zero, constant:<value>
plus the pseudo-token constant-grid, which expands to the nine-value
constant sweep (handled in cli, not here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import AttributionVector, TimeSeries
from .errors import ConfigError, DegenerateInputError
from .rng import SplitMix64

STRATEGY_KINDS = ("gauss", "unif", "opp", "inv", "submean", "zero", "constant")

#: The constant-value sweep used by the "constant-grid" config token.
CONSTANT_GRID = (-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0)

MORF = "morf"
LERF = "lerf"


def _ceil_fraction(pct: float, n: int) -> int:
    """ceil(pct * n) with pct read as the decimal it prints as.

    Binary floats sabotage the naive form: 0.02 * 500 evaluates to
    10.000000000000002, whose ceiling is 11, though ceil(2% of 500) is
    plainly 10. Routing through the shortest decimal representation keeps
    the arithmetic faithful to the configured decimal.
    """
    return math.ceil(Fraction(str(pct)) * n)


@dataclass(frozen=True)
class PerturbationStrategy:
    """One replacement-value rule.

    kind            one of STRATEGY_KINDS
    constant_value  required for kind="constant"
    window_fraction trailing-window fraction k for kind="submean"
    """

    kind: str
    constant_value: float | None = None
    window_fraction: float = 0.1

    def __post_init__(self) -> None:
        if self.kind not in STRATEGY_KINDS:
            raise ConfigError(
                f"unknown strategy kind {self.kind!r}; "
                f"expected one of {', '.join(STRATEGY_KINDS)}"
            )
        if self.kind == "constant":
            if self.constant_value is None or not math.isfinite(self.constant_value):
                raise ConfigError("constant strategy requires a finite constant_value")
        if self.kind == "submean" and not (0.0 < self.window_fraction <= 1.0):
            raise ConfigError(
                f"submean window_fraction must be in (0, 1], got {self.window_fraction}"
            )

    @property
    def name(self) -> str:
        """Canonical token, used in reports and round-tripped by parse_strategy."""
        if self.kind == "constant":
            return f"constant:{self.constant_value!r}"
        return self.kind


def parse_strategy(token: str) -> PerturbationStrategy:
    """Parse a strategy token; see module docstring for the grammar."""
    token = token.strip()
    if token.startswith("constant:"):
        raw = token.split(":", 1)[1]
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"bad constant value {raw!r} in strategy {token!r}") from None
        return PerturbationStrategy(kind="constant", constant_value=value)
    if token == "constant":
        raise ConfigError("constant strategy needs a value: constant:<value>")
    return PerturbationStrategy(kind=token)


def constant_grid() -> tuple[PerturbationStrategy, ...]:
    """The nine-value constant sweep."""
    return tuple(
        PerturbationStrategy(kind="constant", constant_value=c) for c in CONSTANT_GRID
    )


@dataclass(frozen=True)
class PerturbationSchedule:
    """Cumulative perturbation step counts: s features per step up to T total.

    cumulative_steps[j] is the number of features perturbed after step j+1;
    the list is strictly increasing and ends exactly at coverage_target.
    """

    step_size: int
    coverage_target: int
    cumulative_steps: tuple[int, ...]
    m: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "cumulative_steps", tuple(self.cumulative_steps))
        s, t, steps = self.step_size, self.coverage_target, self.cumulative_steps
        if s < 1 or t < 1 or self.m < 1 or len(steps) != self.m:
            raise ConfigError("schedule must have at least one positive step")
        if steps[-1] != t or any(b <= a for a, b in zip(steps, steps[1:])):
            raise ConfigError("cumulative_steps must increase strictly and end at coverage_target")
        if any(steps[j] != min((j + 1) * s, t) for j in range(self.m)):
            raise ConfigError("cumulative_steps inconsistent with step_size/coverage_target")


def make_schedule(
    n: int, step_pct: float = 0.02, coverage_pct: float = 0.5
) -> PerturbationSchedule:
    """Schedule perturbing ceil(step_pct*N) features per step until
    ceil(coverage_pct*N) are perturbed (the last step may be short)."""
    if n < 2:
        raise ConfigError(f"series length must be >= 2, got {n}")
    if not (0.0 < step_pct <= coverage_pct <= 1.0):
        raise ConfigError(
            f"need 0 < step_pct <= coverage_pct <= 1, got {step_pct}, {coverage_pct}"
        )
    step = _ceil_fraction(step_pct, n)
    target = _ceil_fraction(coverage_pct, n)
    m = -(-target // step)
    steps = tuple(min((j + 1) * step, target) for j in range(m))
    return PerturbationSchedule(
        step_size=step, coverage_target=target, cumulative_steps=steps, m=m
    )


@dataclass(frozen=True)
class RankedFeatures:
    """A perturbation order over time points.

    MoRF sorts scores descending, LeRF ascending; ties break by ascending
    time index in both directions.
    """

    order: tuple[int, ...]
    direction: str

    def __post_init__(self) -> None:
        if self.direction not in (MORF, LERF):
            raise ConfigError(f"direction must be {MORF!r} or {LERF!r}")
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("order must be a permutation of 0..N-1")


def rank_features(r: AttributionVector, direction: str) -> RankedFeatures:
    """Perturbation order for the given direction; deterministic under ties."""
    scores = r.scores
    if direction == MORF:
        order = np.argsort(-scores, kind="stable")
    elif direction == LERF:
        order = np.argsort(scores, kind="stable")
    else:
        raise ConfigError(f"direction must be {MORF!r} or {LERF!r}, got {direction!r}")
    return RankedFeatures(order=tuple(int(i) for i in order), direction=direction)


def replacement_series(
    strategy: PerturbationStrategy, x: TimeSeries, seed: int
) -> np.ndarray:
    """Full replacement vector x' computed from the original series.

    Pure in (strategy, x, seed): repeated calls are bit-identical, which is
    what lets MoRF and LeRF share one replacement vector per instance.
    Random strategies (gauss, unif) draw one value per time point from a
    tsape-rng v1 stream seeded with `seed`; deterministic strategies ignore
    the seed entirely.
    """
    values = x.values
    n = values.shape[0]
    kind = strategy.kind
    if kind == "zero":
        return np.zeros(n)
    if kind == "constant":
        return np.full(n, float(strategy.constant_value))
    if kind == "opp":
        return -values
    if kind == "inv":
        return float(np.max(values)) - values
    if kind == "submean":
        wlen = _ceil_fraction(strategy.window_fraction, n)
        out = np.empty(n)
        for i in range(n):
            out[i] = float(np.mean(values[max(0, i - wlen + 1) : i + 1]))
        return out
    if kind == "gauss":
        mu = float(np.mean(values))
        sd = float(np.std(values))  # population convention, matching ingest
        if sd == 0.0:
            raise DegenerateInputError(
                f"series {x.id!r} is constant (std = 0); "
                "gaussian replacement is undefined"
            )
        gen = SplitMix64(seed)
        return np.array([mu + sd * gen.next_gauss() for _ in range(n)])
    if kind == "unif":
        lo = float(np.min(values))
        hi = float(np.max(values))
        gen = SplitMix64(seed)
        # lo == hi degenerates to all-lo with no error.
        return np.array([lo + gen.next_double() * (hi - lo) for _ in range(n)])
    raise ConfigError(f"unknown strategy kind {kind!r}")


def apply_perturbation(
    x: TimeSeries, replacement: np.ndarray, indices
) -> np.ndarray:
    """Copy of x.values with replacement[i] substituted at each index.

    The input series is never mutated.
    """
    values = x.values
    n = values.shape[0]
    idx = np.fromiter((int(i) for i in indices), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ValueError(
            f"perturbation index out of range for series of length {n}"
        )
    out = values.copy()
    if idx.size:
        out[idx] = replacement[idx]
    return out
