"""Command-line pipeline: sample, attribute, perturb, score, aggregate, emit.

The end-to-end run is a pure function of (config, dataset bytes, predictor
behavior, seed): sampling and replacement draws use tsape-rng v1 streams,
per-instance work is keyed by stable indices before merging, and
aggregation reduces in a fixed order, so rerunning a config reproduces
every table byte for byte. Worker parallelism changes wall time only.

Exit codes: 0 ok, 1 config error, 2 data error, 3 predictor/transport
error. The environment variable TSAPE_SEED overrides the config seed.
On failure after partial evaluation, partial tables are written under
<output_dir>/quarantine/ for inspection.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ._version import __version__
from .attribute import (
    AttributionSource,
    fd_gradient_attribution,
    load_attributions,
    occlusion_attribution,
)
from .core import AttributionVector, Dataset, TimeSeries, validate_dataset
from .errors import (
    ConfigError,
    DataError,
    HarnessError,
    TransportError,
)
from .external import ExternalPredictor
from .ingest import SamplingSpec, load_dataset, stratified_sample, znorm_report
from .metrics import InstanceResult, aggregate, evaluate_instance
from .perturb import (
    PerturbationStrategy,
    constant_grid,
    make_schedule,
    parse_strategy,
)
from .predict import Predictor, fit_centroid, fit_logistic
from .report import (
    RunManifest,
    config_hash,
    emit_curves,
    emit_distributions,
    emit_summary,
    emit_summary_json,
    fmt6,
)
from .synthetic import two_class_blobs

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_PREDICTOR = 3

SEED_ENV_VAR = "TSAPE_SEED"

SUMMARY_FILE = "summary.csv"
SUMMARY_JSON_FILE = "summary.json"
DISTRIBUTIONS_FILE = "distributions.csv"
CURVES_FILE = "curves.csv"
MANIFEST_FILE = "manifest.json"

STRATEGY_HELP = """\
perturbation strategies (x is the original series, x' the replacement):
  gauss        x'_i drawn from N(mean(x), std(x)); population std;
               constant series are rejected (std = 0)
  unif         x'_i drawn from U(min(x), max(x)); constant series
               degenerate to all-min
  opp          x'_i = -x_i
  inv          x'_i = max(x) - x_i
  submean      x'_i = mean of the trailing window x[i-l+1..i], with
               l = ceil(k*N) and k default 0.1
  zero         x'_i = 0
  constant:<c> x'_i = c, e.g. constant:1.0
  constant-grid  expands to constant:<c> for
               c in {-2.0,-1.5,-1.0,-0.5,0.0,0.5,1.0,1.5,2.0}
"""


@dataclass(frozen=True)
class RunConfig:
    """Fully parsed and validated evaluation configuration.

    Paths are resolved relative to the config file; cfg_hash digests the
    canonical effective config (defaults filled in, seed override applied,
    paths as written).
    """

    dataset_path: Path
    dataset_format: str
    per_class: int
    seed: int
    predictor: dict
    sources: tuple[AttributionSource, ...]
    strategy_names: tuple[str, ...]
    strategies: tuple[PerturbationStrategy, ...]
    step_pct: float
    coverage_pct: float
    alphas: tuple[float, ...]
    output_dir: Path
    only_correct: bool
    cfg_hash: str


def _check_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"{where}: missing required key(s) {sorted(missing)}")


def _typed(obj: dict, key: str, types, default, where: str):
    if key not in obj:
        return default
    value = obj[key]
    # bool is an int subclass, so reject it explicitly for numeric fields
    if isinstance(value, bool) and bool not in (
        types if isinstance(types, tuple) else (types,)
    ):
        raise ConfigError(f"{where}.{key}: expected a number, got a boolean")
    if not isinstance(value, types):
        raise ConfigError(f"{where}.{key}: bad type {type(value).__name__}")
    return value


def _parse_sources(raw, config_dir: Path) -> tuple[AttributionSource, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("attributions: need a nonempty list of sources")
    sources = []
    for i, entry in enumerate(raw):
        where = f"attributions[{i}]"
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ConfigError(f"{where}: each source is an object with a 'kind'")
        kind = entry["kind"]
        if kind == "occlusion":
            _check_keys(entry, {"kind", "window", "value"}, {"kind"}, where)
            sources.append(
                AttributionSource(
                    kind=kind,
                    occlusion_window=_typed(entry, "window", int, 1, where),
                    occlusion_value=float(
                        _typed(entry, "value", (int, float), 0.0, where)
                    ),
                )
            )
        elif kind == "fd-gradient":
            _check_keys(entry, {"kind", "epsilon", "abs"}, {"kind"}, where)
            sources.append(
                AttributionSource(
                    kind=kind,
                    fd_epsilon=float(
                        _typed(entry, "epsilon", (int, float), 1e-3, where)
                    ),
                    fd_abs=_typed(entry, "abs", bool, False, where),
                )
            )
        elif kind == "file":
            _check_keys(entry, {"kind", "path"}, {"kind", "path"}, where)
            path = _typed(entry, "path", str, None, where)
            sources.append(
                AttributionSource(kind=kind, path=str(config_dir / path))
            )
        else:
            raise ConfigError(
                f"{where}: unknown kind {kind!r}; "
                "expected occlusion, fd-gradient, or file"
            )
    return tuple(sources)


def _source_effective(entry: AttributionSource, raw: dict) -> dict:
    """Canonical form of one attribution source for hashing (defaults
    filled, path as written in the file)."""
    if entry.kind == "occlusion":
        return {
            "kind": "occlusion",
            "window": entry.occlusion_window,
            "value": entry.occlusion_value,
        }
    if entry.kind == "fd-gradient":
        return {"kind": "fd-gradient", "epsilon": entry.fd_epsilon, "abs": entry.fd_abs}
    return {"kind": "file", "path": raw["path"]}


def parse_run_config(path: str | Path) -> RunConfig:
    """Parse and validate a JSON run config; see README for the schema.

    All relative paths are taken relative to the config file's directory.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    config_dir = path.parent
    _check_keys(
        raw,
        {
            "dataset",
            "sample",
            "predictor",
            "attributions",
            "strategies",
            "schedule",
            "alphas",
            "output_dir",
            "only_correct",
        },
        {"dataset", "predictor", "attributions", "strategies"},
        "config",
    )

    dataset = raw["dataset"]
    if not isinstance(dataset, dict):
        raise ConfigError("dataset: expected an object {path, format}")
    _check_keys(dataset, {"path", "format"}, {"path"}, "dataset")
    dataset_rel = _typed(dataset, "path", str, None, "dataset")
    dataset_format = _typed(dataset, "format", str, "ucr-tsv", "dataset")

    sample = raw.get("sample", {})
    if not isinstance(sample, dict):
        raise ConfigError("sample: expected an object {per_class, seed}")
    _check_keys(sample, {"per_class", "seed"}, set(), "sample")
    per_class = _typed(sample, "per_class", int, 300, "sample")
    seed = _typed(sample, "seed", int, 0, "sample")
    if SEED_ENV_VAR in os.environ:
        try:
            seed = int(os.environ[SEED_ENV_VAR])
        except ValueError:
            raise ConfigError(
                f"{SEED_ENV_VAR} must be an integer, got "
                f"{os.environ[SEED_ENV_VAR]!r}"
            ) from None
        log.info("seed overridden to %d by %s", seed, SEED_ENV_VAR)
    if per_class < 1:
        raise ConfigError(f"sample.per_class must be >= 1, got {per_class}")

    predictor = raw["predictor"]
    if not isinstance(predictor, dict) or "kind" not in predictor:
        raise ConfigError("predictor: expected an object with a 'kind'")
    kind = predictor["kind"]
    if kind == "centroid":
        _check_keys(predictor, {"kind", "tau"}, {"kind"}, "predictor")
        predictor_effective = {
            "kind": kind,
            "tau": float(_typed(predictor, "tau", (int, float), 0.05, "predictor")),
        }
    elif kind == "logistic":
        _check_keys(
            predictor, {"kind", "epochs", "learning_rate"}, {"kind"}, "predictor"
        )
        predictor_effective = {
            "kind": kind,
            "epochs": _typed(predictor, "epochs", int, 200, "predictor"),
            "learning_rate": float(
                _typed(predictor, "learning_rate", (int, float), 0.1, "predictor")
            ),
        }
    elif kind == "command":
        _check_keys(predictor, {"kind", "argv"}, {"kind", "argv"}, "predictor")
        argv = predictor["argv"]
        if (
            not isinstance(argv, list)
            or not argv
            or not all(isinstance(a, str) for a in argv)
        ):
            raise ConfigError("predictor.argv: expected a nonempty list of strings")
        predictor_effective = {"kind": kind, "argv": list(argv)}
    elif kind == "tcp":
        _check_keys(predictor, {"kind", "address"}, {"kind", "address"}, "predictor")
        predictor_effective = {
            "kind": kind,
            "address": _typed(predictor, "address", str, None, "predictor"),
        }
    else:
        raise ConfigError(
            f"predictor.kind {kind!r} not supported; "
            "expected centroid, logistic, command, or tcp"
        )

    sources = _parse_sources(raw["attributions"], config_dir)

    strategy_names = raw["strategies"]
    if (
        not isinstance(strategy_names, list)
        or not strategy_names
        or not all(isinstance(s, str) for s in strategy_names)
    ):
        raise ConfigError("strategies: need a nonempty list of strategy tokens")
    strategies: list[PerturbationStrategy] = []
    for token in strategy_names:
        if token == "constant-grid":
            strategies.extend(constant_grid())
        else:
            strategies.append(parse_strategy(token))

    schedule_obj = raw.get("schedule", {})
    if not isinstance(schedule_obj, dict):
        raise ConfigError("schedule: expected an object {step_pct, coverage_pct}")
    _check_keys(schedule_obj, {"step_pct", "coverage_pct"}, set(), "schedule")
    step_pct = float(_typed(schedule_obj, "step_pct", (int, float), 0.02, "schedule"))
    coverage_pct = float(
        _typed(schedule_obj, "coverage_pct", (int, float), 0.5, "schedule")
    )

    alphas_raw = raw.get("alphas", [0, 1])
    if not isinstance(alphas_raw, list) or not alphas_raw:
        raise ConfigError("alphas: need a nonempty list of numbers in [0, 1]")
    alphas: list[float] = []
    for a in alphas_raw:
        if isinstance(a, bool) or not isinstance(a, (int, float)):
            raise ConfigError(f"alphas: bad entry {a!r}")
        a = float(a)
        if not (0.0 <= a <= 1.0):
            raise ConfigError(f"alphas must lie in [0, 1], got {a}")
        if a not in alphas:
            alphas.append(a)

    output_rel = _typed(raw, "output_dir", str, "out", "config")
    only_correct = _typed(raw, "only_correct", bool, False, "config")

    effective = {
        "dataset": {"path": dataset_rel, "format": dataset_format},
        "sample": {"per_class": per_class, "seed": seed},
        "predictor": predictor_effective,
        "attributions": [
            _source_effective(src, raw["attributions"][i])
            for i, src in enumerate(sources)
        ],
        "strategies": list(strategy_names),
        "schedule": {"step_pct": step_pct, "coverage_pct": coverage_pct},
        "alphas": alphas,
        "output_dir": output_rel,
        "only_correct": only_correct,
    }
    return RunConfig(
        dataset_path=config_dir / dataset_rel,
        dataset_format=dataset_format,
        per_class=per_class,
        seed=seed,
        predictor=predictor_effective,
        sources=sources,
        strategy_names=tuple(strategy_names),
        strategies=tuple(strategies),
        step_pct=step_pct,
        coverage_pct=coverage_pct,
        alphas=tuple(alphas),
        output_dir=config_dir / output_rel,
        only_correct=only_correct,
        cfg_hash=config_hash(effective),
    )


def _build_predictor(spec: dict, dataset: Dataset) -> Predictor:
    """Instantiate the configured predictor; builtins are fit on the FULL
    dataset (before sampling) so the model does not change when the
    evaluation sample does."""
    kind = spec["kind"]
    if kind == "centroid":
        return fit_centroid(dataset, temperature=spec["tau"])
    if kind == "logistic":
        return fit_logistic(
            dataset, epochs=spec["epochs"], learning_rate=spec["learning_rate"]
        )
    if kind == "command":
        return ExternalPredictor.spawn(spec["argv"])
    if kind == "tcp":
        return ExternalPredictor.connect_tcp(spec["address"])
    raise ConfigError(f"predictor.kind {kind!r} not supported")


@dataclass(frozen=True)
class _ResolvedSource:
    """One attribution producer with a fixed method label."""

    label: str
    source: AttributionSource
    file_vectors: dict | None = None  # series_id -> AttributionVector

    def compute(self, h: Predictor, ts: TimeSeries) -> AttributionVector:
        assert ts.predicted_class is not None
        if self.source.kind == "occlusion":
            return occlusion_attribution(
                h,
                ts,
                ts.predicted_class,
                w=self.source.occlusion_window,
                v=self.source.occlusion_value,
            )
        if self.source.kind == "fd-gradient":
            return fd_gradient_attribution(
                h,
                ts,
                ts.predicted_class,
                eps=self.source.fd_epsilon,
                abs_scores=self.source.fd_abs,
            )
        vec = self.file_vectors.get(str(ts.id))
        if vec is None:
            raise DataError(
                f"attribution file lacks a {self.label!r} vector for series {ts.id!r}"
            )
        if vec.target_class != ts.predicted_class:
            raise DataError(
                f"series {ts.id!r}: file attribution targets class "
                f"{vec.target_class} but the predictor chose {ts.predicted_class}"
            )
        return vec


def _resolve_sources(
    sources: tuple[AttributionSource, ...], dataset: Dataset
) -> list[_ResolvedSource]:
    """Turn config sources into labeled producers. A file source expands to
    one producer per distinct method name found in the file."""
    resolved: list[_ResolvedSource] = []
    for source in sources:
        if source.kind == "occlusion":
            resolved.append(_ResolvedSource(label="FO", source=source))
        elif source.kind == "fd-gradient":
            label = "GR-fd-abs" if source.fd_abs else "GR-fd"
            resolved.append(_ResolvedSource(label=label, source=source))
        else:
            vectors = load_attributions(source.path, dataset)
            by_method: dict[str, dict] = {}
            for vec in vectors:
                per_id = by_method.setdefault(vec.method, {})
                key = str(vec.series_id)
                if key in per_id:
                    raise DataError(
                        f"{Path(source.path).name}: duplicate attribution for "
                        f"series {key!r}, method {vec.method!r}"
                    )
                per_id[key] = vec
            for method in sorted(by_method):
                resolved.append(
                    _ResolvedSource(
                        label=method, source=source, file_vectors=by_method[method]
                    )
                )
    return resolved


def _predict_classes(h: Predictor, instances) -> list[TimeSeries]:
    """Attach the predicted class (argmax, ties to the lowest id) to every
    instance, using one batched prediction pass."""
    probs = h.predict_proba(np.stack([ts.values for ts in instances]))
    classes = np.argmax(probs, axis=1)  # ties resolve to the lowest index
    return [
        dataclasses.replace(ts, predicted_class=int(c))
        for ts, c in zip(instances, classes)
    ]


def _quarantine_partial(
    out_dir: Path,
    cfg_hash: str,
    completed: dict,
    error: BaseException,
) -> None:
    """Best-effort dump of partial results after a failed run."""
    qdir = out_dir / "quarantine"
    try:
        qdir.mkdir(parents=True, exist_ok=True)
        (qdir / "error.txt").write_text(f"{type(error).__name__}: {error}\n")
        results = [completed[key] for key in sorted(completed)]
        flat = [item for per_task in results for item in per_task]
        if flat:
            emit_distributions(
                [res.record for res in flat], qdir / DISTRIBUTIONS_FILE, cfg_hash
            )
            emit_curves(
                [c for res in flat for c in (res.morf, res.lerf)],
                qdir / CURVES_FILE,
                cfg_hash,
            )
        log.error(
            "run failed; %d partial task results quarantined under %s",
            len(results),
            qdir,
        )
    except Exception as dump_exc:  # the original error matters more
        log.error("could not write quarantine outputs: %s", dump_exc)


def _execute_run(
    *,
    dataset: Dataset,
    predictor: Predictor,
    sources: tuple[AttributionSource, ...],
    strategies: tuple[PerturbationStrategy, ...],
    per_class: int,
    seed: int,
    step_pct: float,
    coverage_pct: float,
    alphas: tuple[float, ...],
    only_correct: bool,
    out_dir: Path,
    cfg_hash: str,
    workers: int = 1,
    emit_json: bool = False,
    dataset_label: str | None = None,
):
    """Shared pipeline behind `evaluate` and `demo-class-effect`.

    Returns (cells, n_records, n_curves).
    """
    started_at = datetime.now(timezone.utc).isoformat()
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    violations = validate_dataset(dataset)
    if violations:
        shown = "; ".join(violations[:10])
        more = f" (+{len(violations) - 10} more)" if len(violations) > 10 else ""
        raise DataError(f"dataset failed validation: {shown}{more}")
    if predictor.n_classes != dataset.n_classes:
        raise DataError(
            f"predictor handles {predictor.n_classes} classes but the dataset "
            f"has {dataset.n_classes}"
        )
    if (
        predictor.series_length is not None
        and predictor.series_length != dataset.series_length
    ):
        raise DataError(
            f"predictor expects series of length {predictor.series_length} but "
            f"the dataset has length {dataset.series_length}"
        )

    sampled_ds = stratified_sample(dataset, SamplingSpec(per_class=per_class, seed=seed))
    flagged = [row for row in znorm_report(sampled_ds) if row.flagged]
    if flagged:
        log.warning(
            "%d of %d sampled instances deviate from z-normalization "
            "(|mean| > 0.1 or |std-1| > 0.1); gauss/unif replacements follow "
            "the raw scale",
            len(flagged),
            len(sampled_ds.instances),
        )

    instances = _predict_classes(predictor, sampled_ds.instances)
    if only_correct:
        kept = [ts for ts in instances if ts.predicted_class == ts.label]
        log.info(
            "only_correct: keeping %d of %d instances", len(kept), len(instances)
        )
        if not kept:
            raise DataError("only_correct filter removed every sampled instance")
        instances = kept

    schedule = make_schedule(dataset.series_length, step_pct, coverage_pct)
    resolved = _resolve_sources(sources, dataset)

    def task(source_idx: int, inst_idx: int) -> list[InstanceResult]:
        src = resolved[source_idx]
        ts = instances[inst_idx]
        r = src.compute(predictor, ts)
        return [
            evaluate_instance(predictor, ts, r, strat, schedule, seed)
            for strat in strategies
        ]

    keys = [(si, ii) for si in range(len(resolved)) for ii in range(len(instances))]
    completed: dict[tuple[int, int], list[InstanceResult]] = {}
    try:
        if workers == 1:
            for key in keys:
                completed[key] = task(*key)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {key: pool.submit(task, *key) for key in keys}
                for key, future in futures.items():
                    completed[key] = future.result()
    except Exception as exc:
        _quarantine_partial(out_dir, cfg_hash, completed, exc)
        raise

    # deterministic assembly: source-major, then strategy, then instance
    records = []
    curves = []
    cells = []
    for si in range(len(resolved)):
        for strat_idx in range(len(strategies)):
            cell_records = []
            for ii in range(len(instances)):
                res = completed[(si, ii)][strat_idx]
                cell_records.append(res.record)
                curves.append(res.morf)
                curves.append(res.lerf)
            records.extend(cell_records)
            cells.append(aggregate(cell_records, alphas))

    out_dir.mkdir(parents=True, exist_ok=True)
    dataset_name = dataset_label or dataset.name
    emit_summary(cells, out_dir / SUMMARY_FILE, dataset_name, predictor.describe(), cfg_hash)
    if emit_json:
        emit_summary_json(
            cells, out_dir / SUMMARY_JSON_FILE, dataset_name, predictor.describe(), cfg_hash
        )
    emit_distributions(records, out_dir / DISTRIBUTIONS_FILE, cfg_hash)
    emit_curves(curves, out_dir / CURVES_FILE, cfg_hash)
    methods = []
    for src in resolved:
        if src.label not in methods:
            methods.append(src.label)
    manifest = RunManifest(
        config_hash=cfg_hash,
        seed=seed,
        dataset_name=dataset_name,
        predictor=predictor.describe(),
        strategies=tuple(s.name for s in strategies),
        methods=tuple(methods),
        alphas=alphas,
        started_at=started_at,
        finished_at=datetime.now(timezone.utc).isoformat(),
    )
    manifest.save(out_dir / MANIFEST_FILE)
    return cells, len(records), len(curves)


def run(config: RunConfig, workers: int = 1, emit_json: bool = False) -> int:
    """Execute one evaluation run end to end."""
    dataset = load_dataset(config.dataset_path, format=config.dataset_format)
    predictor = _build_predictor(config.predictor, dataset)
    try:
        cells, n_records, n_curves = _execute_run(
            dataset=dataset,
            predictor=predictor,
            sources=config.sources,
            strategies=config.strategies,
            per_class=config.per_class,
            seed=config.seed,
            step_pct=config.step_pct,
            coverage_pct=config.coverage_pct,
            alphas=config.alphas,
            only_correct=config.only_correct,
            out_dir=config.output_dir,
            cfg_hash=config.cfg_hash,
            workers=workers,
            emit_json=emit_json,
        )
    finally:
        predictor.close()
    print(
        f"wrote {config.output_dir / SUMMARY_FILE} "
        f"({len(cells)} cells, {n_records} records, {n_curves} curves)"
    )
    return EXIT_OK


def demo_class_effect(out_dir: str | Path, seed: int = 0) -> int:
    """Class-dependent perturbation demo on a synthetic binary dataset.

    Class 0 is noise around the zero vector, class 1 noise around the
    all-ones vector; the centroid predictor separates them perfectly. The
    Zero strategy rewrites any series toward centroid 0, constant:1.0
    toward centroid 1, so per-class mean ds is the quantity to inspect in
    the emitted summary.
    """
    out_dir = Path(out_dir)
    params = {
        "demo": "class-effect",
        "per_class": 200,
        "length": 64,
        "centers": [0.0, 1.0],
        "noise": 0.1,
        "tau": 0.05,
        "strategies": ["zero", "constant:1.0"],
        "seed": seed,
    }
    dataset = two_class_blobs(
        per_class=200, length=64, centers=(0.0, 1.0), noise=0.1, seed=seed,
        name="class-effect-demo",
    )
    predictor = fit_centroid(dataset, temperature=0.05)
    cells, n_records, _ = _execute_run(
        dataset=dataset,
        predictor=predictor,
        sources=(AttributionSource(kind="occlusion"),),
        strategies=(
            PerturbationStrategy(kind="zero"),
            PerturbationStrategy(kind="constant", constant_value=1.0),
        ),
        per_class=200,
        seed=seed,
        step_pct=0.02,
        coverage_pct=0.5,
        alphas=(0.0, 1.0),
        only_correct=False,
        out_dir=out_dir,
        cfg_hash=config_hash(params),
    )
    print(f"wrote {out_dir / SUMMARY_FILE} ({n_records} records)")
    for cell in cells:
        per_class = ", ".join(
            f"class {c}: {fmt6(m)}" for c, m in sorted(cell.per_class_mean_ds.items())
        )
        print(
            f"{cell.method} / {cell.strategy}: mean_ds {fmt6(cell.mean_ds)} "
            f"({per_class}, delta {fmt6(cell.delta)})"
        )
    return EXIT_OK


def validate_config(path: str | Path) -> int:
    """Dry-run checks: config schema, dataset, schedule arithmetic, and
    attribution files. The predictor is not contacted."""
    config = parse_run_config(path)
    dataset = load_dataset(config.dataset_path, format=config.dataset_format)
    violations = validate_dataset(dataset)
    if violations:
        shown = "; ".join(violations[:10])
        raise DataError(f"dataset failed validation: {shown}")
    schedule = make_schedule(
        dataset.series_length, config.step_pct, config.coverage_pct
    )
    for source in config.sources:
        if source.kind == "file":
            load_attributions(source.path, dataset)
    print(f"config hash {config.cfg_hash}")
    print(
        f"dataset {dataset.name}: {len(dataset.instances)} instances, "
        f"{dataset.n_classes} classes, length {dataset.series_length}"
    )
    print(
        f"schedule: {schedule.step_size} points/step, target "
        f"{schedule.coverage_target}, {schedule.m} steps"
    )
    print(f"strategies: {', '.join(s.name for s in config.strategies)}")
    print(f"predictor: {config.predictor['kind']} (not contacted)")
    print("ok")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors, which collides with
    the data-error exit code; surface usage problems as config errors."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="tsape", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tsape {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="run a full evaluation from a config")
    p_eval.add_argument("--config", required=True, help="JSON run config")
    p_eval.add_argument(
        "--json", action="store_true", help="also emit summary.json"
    )
    p_eval.add_argument(
        "--workers", type=int, default=1, help="parallel instance workers"
    )

    sub.add_parser("strategies", help="list perturbation strategies")

    p_demo = sub.add_parser(
        "demo-class-effect", help="run the class-dependent perturbation demo"
    )
    p_demo.add_argument("--out", required=True, help="output directory")
    p_demo.add_argument("--seed", type=int, default=0)

    p_val = sub.add_parser("validate", help="dry-run checks on a config")
    p_val.add_argument("--config", required=True, help="JSON run config")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "evaluate":
            return run(
                parse_run_config(args.config),
                workers=args.workers,
                emit_json=args.json,
            )
        if args.command == "strategies":
            print(STRATEGY_HELP, end="")
            return EXIT_OK
        if args.command == "demo-class-effect":
            return demo_class_effect(args.out, seed=args.seed)
        if args.command == "validate":
            return validate_config(args.config)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TransportError as exc:
        print(f"predictor error: {exc}", file=sys.stderr)
        return EXIT_PREDICTOR
    except (DataError, HarnessError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
