"""tsape: model-agnostic evaluation of time-series feature attributions.

Attributions are scored by perturbation analysis: rank time points by
attributed relevance, replace the most (MoRF) or least (LeRF) relevant
points first under a configurable replacement strategy, and measure how
fast the predicted-class probability degrades. The gap between the two
orderings is the degradation score ds; per-class disparity in mean ds is
penalized by the class-adjusted score ds_c.
"""

from ._version import __version__
from .attribute import (
    FD_GRADIENT_ABS_METHOD,
    FD_GRADIENT_METHOD,
    OCCLUSION_METHOD,
    AttributionSource,
    attribution_header,
    fd_gradient_attribution,
    load_attributions,
    occlusion_attribution,
    save_attributions,
)
from .core import (
    AttributionVector,
    Dataset,
    ProbVector,
    TimeSeries,
    predicted_class,
    validate_dataset,
)
from .errors import (
    ConfigError,
    DataError,
    DegenerateInputError,
    HarnessError,
    ParseError,
    TransportError,
)
from .external import ExternalPredictor
from .ingest import (
    SamplingSpec,
    load_dataset,
    remap_labels,
    save_dataset,
    stratified_sample,
    znorm_report,
)
from .metrics import (
    AggregateCell,
    DegradationRecord,
    InstanceResult,
    PerturbationCurve,
    aggregate,
    class_adjusted_ds,
    class_means,
    degradation_score,
    evaluate_instance,
    penalty,
    perturbation_curve,
)
from .perturb import (
    CONSTANT_GRID,
    LERF,
    MORF,
    STRATEGY_KINDS,
    PerturbationSchedule,
    PerturbationStrategy,
    RankedFeatures,
    apply_perturbation,
    constant_grid,
    make_schedule,
    parse_strategy,
    rank_features,
    replacement_series,
)
from .predict import (
    CentroidModel,
    LogisticModel,
    Predictor,
    fit_centroid,
    fit_logistic,
    predict_proba,
)
from .report import (
    RunManifest,
    config_hash,
    emit_curves,
    emit_distributions,
    emit_summary,
    emit_summary_json,
    fmt6,
    summary_rows,
)
from .rng import RNG_VERSION, SplitMix64, derive_seed, fnv1a64
from .synthetic import two_class_blobs

__all__ = [
    "__version__",
    "AggregateCell",
    "AttributionSource",
    "AttributionVector",
    "CONSTANT_GRID",
    "CentroidModel",
    "ConfigError",
    "DataError",
    "Dataset",
    "DegenerateInputError",
    "DegradationRecord",
    "ExternalPredictor",
    "FD_GRADIENT_ABS_METHOD",
    "FD_GRADIENT_METHOD",
    "OCCLUSION_METHOD",
    "HarnessError",
    "InstanceResult",
    "LERF",
    "LogisticModel",
    "MORF",
    "ParseError",
    "PerturbationCurve",
    "PerturbationSchedule",
    "PerturbationStrategy",
    "Predictor",
    "ProbVector",
    "RankedFeatures",
    "RNG_VERSION",
    "RunManifest",
    "STRATEGY_KINDS",
    "SamplingSpec",
    "SplitMix64",
    "TimeSeries",
    "TransportError",
    "aggregate",
    "apply_perturbation",
    "class_adjusted_ds",
    "class_means",
    "config_hash",
    "constant_grid",
    "degradation_score",
    "derive_seed",
    "emit_curves",
    "emit_distributions",
    "emit_summary",
    "emit_summary_json",
    "evaluate_instance",
    "fd_gradient_attribution",
    "fit_centroid",
    "fit_logistic",
    "fmt6",
    "fnv1a64",
    "load_attributions",
    "load_dataset",
    "make_schedule",
    "occlusion_attribution",
    "parse_strategy",
    "penalty",
    "perturbation_curve",
    "predict_proba",
    "predicted_class",
    "rank_features",
    "remap_labels",
    "replacement_series",
    "save_attributions",
    "save_dataset",
    "stratified_sample",
    "summary_rows",
    "two_class_blobs",
    "validate_dataset",
    "znorm_report",
]
