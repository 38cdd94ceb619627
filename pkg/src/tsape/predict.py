"""Uniform black-box predictor contract with two built-in toy classifiers.

Every predictor exposes predict_proba over batches of series and carries
(kind, n_classes, series_length, batch_limit). Batches larger than
batch_limit are chunked internally; chunking and batch order never change
the numbers, because the built-in models compute each row independently
(elementwise broadcasting plus per-row reductions, no cross-row BLAS
kernels whose accumulation order could vary with the batch shape).

Built-in predictors are immutable after fitting and safe to call from
concurrent workers. The external-process client lives in tsape.external.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Dataset
from .errors import DataError

DEFAULT_BATCH_LIMIT = 1024


def _as_batch(batch, series_length: int | None) -> np.ndarray:
    arr = np.asarray(batch, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise DataError(f"batch must be 2-d (instances x time), got shape {arr.shape}")
    if series_length is not None and arr.shape[1] != series_length:
        raise DataError(
            f"batch series length {arr.shape[1]} does not match "
            f"predictor series length {series_length}"
        )
    return arr


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


class Predictor:
    """Common batching behavior; subclasses implement _predict_chunk."""

    kind: str = "builtin"
    n_classes: int
    series_length: int | None
    batch_limit: int = DEFAULT_BATCH_LIMIT

    def _predict_chunk(self, arr: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict_proba(self, batch) -> np.ndarray:
        """Probabilities for a batch, one row per input, order-preserving.

        Returns an (n, C) array; every row sums to 1 within 1e-6 and lies
        in [0, 1].
        """
        arr = _as_batch(batch, self.series_length)
        chunks = [
            self._predict_chunk(arr[i : i + self.batch_limit])
            for i in range(0, arr.shape[0], self.batch_limit)
        ]
        return np.concatenate(chunks, axis=0) if len(chunks) > 1 else chunks[0]

    def describe(self) -> str:
        return self.kind

    def close(self) -> None:  # uniform teardown; builtins hold no resources
        pass


def predict_proba(h: Predictor, batch) -> np.ndarray:
    """Module-level alias for h.predict_proba(batch)."""
    return h.predict_proba(batch)


@dataclass(frozen=True)
class CentroidModel(Predictor):
    """Nearest-centroid classifier with softmax over scaled negative
    squared distances: p(c|x) = softmax_c(-||x - centroid_c||^2 / tau)."""

    centroids: np.ndarray
    temperature: float
    kind: str = field(default="builtin-centroid", init=False)

    def __post_init__(self) -> None:
        arr = np.array(self.centroids, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 2:
            raise DataError("centroids must be a (C >= 2) x N matrix")
        if self.temperature <= 0:
            raise DataError(f"temperature must be > 0, got {self.temperature}")
        arr.setflags(write=False)
        object.__setattr__(self, "centroids", arr)

    @property
    def n_classes(self) -> int:
        return int(self.centroids.shape[0])

    @property
    def series_length(self) -> int:
        return int(self.centroids.shape[1])

    def _predict_chunk(self, arr: np.ndarray) -> np.ndarray:
        diffs = arr[:, None, :] - self.centroids[None, :, :]
        d2 = (diffs * diffs).sum(axis=2)
        return _softmax_rows(-d2 / self.temperature)

    def describe(self) -> str:
        return f"centroid(classes={self.n_classes}, tau={self.temperature!r})"


def fit_centroid(d: Dataset, temperature: float) -> CentroidModel:
    """Per-class mean centroids from a labeled dataset."""
    centroids = np.empty((d.n_classes, d.series_length))
    for cls in range(d.n_classes):
        members = [ts.values for ts in d.instances if ts.label == cls]
        if not members:
            raise DataError(f"class {cls} has no instances; cannot fit centroid")
        centroids[cls] = np.mean(np.stack(members), axis=0)
    return CentroidModel(centroids=centroids, temperature=temperature)


@dataclass(frozen=True)
class LogisticModel(Predictor):
    """Multinomial logistic regression: p(c|x) = softmax_c(W_c . x + b_c)."""

    weights: np.ndarray
    biases: np.ndarray
    final_loss: float | None = None
    initial_loss: float | None = None
    kind: str = field(default="builtin-logistic", init=False)

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=np.float64, copy=True)
        b = np.array(self.biases, dtype=np.float64, copy=True)
        if w.ndim != 2 or b.ndim != 1 or b.shape[0] != w.shape[0] or w.shape[0] < 2:
            raise DataError("weights must be (C >= 2) x N with C biases")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise DataError("logistic parameters must be finite")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @property
    def n_classes(self) -> int:
        return int(self.weights.shape[0])

    @property
    def series_length(self) -> int:
        return int(self.weights.shape[1])

    def _predict_chunk(self, arr: np.ndarray) -> np.ndarray:
        # Broadcast-and-reduce keeps each row's accumulation order fixed
        # regardless of batch size, unlike a matmul dispatched to BLAS.
        logits = (arr[:, None, :] * self.weights[None, :, :]).sum(axis=2)
        return _softmax_rows(logits + self.biases[None, :])

    def describe(self) -> str:
        return f"logistic(classes={self.n_classes})"


def fit_logistic(
    d: Dataset, epochs: int, learning_rate: float, seed: int = 0
) -> LogisticModel:
    """Full-batch gradient descent on multinomial cross-entropy.

    Initialization is all-zeros, so zero epochs returns the uniform
    predictor and the result is deterministic; the seed parameter is
    accepted for interface stability but unused under zero initialization.
    """
    del seed
    if epochs < 0:
        raise DataError(f"epochs must be >= 0, got {epochs}")
    if learning_rate <= 0:
        raise DataError(f"learning_rate must be > 0, got {learning_rate}")
    if any(ts.label is None for ts in d.instances):
        raise DataError("logistic fitting requires labels on every instance")
    x = np.stack([ts.values for ts in d.instances])
    y = np.array([ts.label for ts in d.instances], dtype=np.int64)
    n = x.shape[0]
    onehot = np.zeros((n, d.n_classes))
    onehot[np.arange(n), y] = 1.0
    w = np.zeros((d.n_classes, d.series_length))
    b = np.zeros(d.n_classes)

    def loss_and_probs():
        probs = _softmax_rows(x @ w.T + b[None, :])
        loss = float(-np.mean(np.log(np.maximum(probs[np.arange(n), y], 1e-300))))
        return loss, probs

    initial_loss, probs = loss_and_probs()
    loss = initial_loss
    # divergence is detected via the loss check, so the transient
    # overflow/invalid warnings on the way there are expected noise
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(epochs):
            grad = (probs - onehot) / n
            w -= learning_rate * (grad.T @ x)
            b -= learning_rate * grad.sum(axis=0)
            loss, probs = loss_and_probs()
            if not np.isfinite(loss):
                raise DataError(
                    "logistic training diverged (non-finite loss); "
                    "try a smaller learning_rate"
                )
    return LogisticModel(
        weights=w, biases=b, final_loss=loss, initial_loss=initial_loss
    )
