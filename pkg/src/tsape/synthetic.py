"""Synthetic two-class gaussian-blob datasets for demos and tests.

Class c is drawn as independent per-time-point noise around a constant
center level, using a single tsape-rng v1 stream, so the dataset is a
pure function of its parameters. Instances are emitted class 0 first,
ids are the 0-based global indices as strings.
"""

from __future__ import annotations

from .core import Dataset, TimeSeries
from .errors import DataError
from .rng import SplitMix64


def two_class_blobs(
    per_class: int = 200,
    length: int = 64,
    centers: tuple[float, float] = (0.0, 1.0),
    noise: float = 0.1,
    seed: int = 0,
    name: str = "blobs",
) -> Dataset:
    """Balanced binary dataset: class 0 around centers[0], class 1 around
    centers[1], i.i.d. gaussian noise with standard deviation `noise`."""
    if per_class < 1 or length < 2:
        raise DataError(
            f"need per_class >= 1 and length >= 2, got {per_class}, {length}"
        )
    if noise <= 0:
        raise DataError(f"noise must be > 0, got {noise}")
    gen = SplitMix64(seed)
    instances = []
    for cls, center in enumerate(centers):
        for _ in range(per_class):
            values = [center + noise * gen.next_gauss() for _ in range(length)]
            instances.append(
                TimeSeries(id=str(len(instances)), values=values, label=cls)
            )
    return Dataset.from_instances(name=name, n_classes=2, instances=instances)
