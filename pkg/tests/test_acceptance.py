"""Acceptance gate: one test per release criterion.

Each test drives the public surface end to end, records one PASS/FAIL
line (with runtime) for the terminal summary, and enforces the stated
runtime budget. A failing criterion fails its test; nothing here is
routed around.
"""

import dataclasses
import random
import re
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import acceptance_report
from oracle import brute_force_curve, logistic_probability_gradient, naive_order
from test_cli import base_config, write_blob_dataset, write_config
from test_external import expected_rows, spawn
from test_metrics import curve, record
import tsape
from tsape import (
    AttributionVector,
    fd_gradient_attribution,
    fit_centroid,
    fit_logistic,
    make_schedule,
    occlusion_attribution,
    two_class_blobs,
)
from tsape.cli import EXIT_OK, main
from tsape.errors import TransportError
from tsape.metrics import (
    class_adjusted_ds,
    class_means,
    degradation_score,
    evaluate_instance,
    penalty,
    perturbation_curve,
)
from tsape.perturb import LERF, MORF, PerturbationStrategy


def run_criterion(name, budget_s, fn):
    """Time fn, record one summary line, and enforce the runtime budget."""
    t0 = time.perf_counter()
    try:
        detail = fn() or ""
    except BaseException as exc:
        elapsed = time.perf_counter() - t0
        text = str(exc).strip()
        first = text.splitlines()[0] if text else type(exc).__name__
        acceptance_report.record(name, False, elapsed, detail=first)
        raise
    elapsed = time.perf_counter() - t0
    if budget_s is not None and elapsed >= budget_s:
        acceptance_report.record(
            name, False, elapsed, detail=f"runtime budget {budget_s}s exceeded"
        )
        pytest.fail(f"{name}: runtime {elapsed:.4f}s exceeds budget {budget_s}s")
    acceptance_report.record(name, True, elapsed, detail=detail)


def with_prediction(model, ts):
    probs = model.predict_proba(ts.values)
    return dataclasses.replace(ts, predicted_class=int(np.argmax(probs)))


DYADIC = 2.0**-40


def test_ac1_worked_example_fidelity():
    def impl():
        recs = [record(1.0, cls=0), record(0.0, cls=1)]
        per_class, overall = class_means(recs)
        assert per_class == {0: 1.0, 1: 0.0}
        assert overall == 0.5
        delta = penalty(per_class)
        assert delta == 0.5
        assert class_adjusted_ds(overall, delta, 1.0) == 0.0
        return "means {1, 0}: mean 0.5, delta 0.5, adjusted(alpha=1) 0.0, exact"

    impl()  # warm-up so the timed pass measures arithmetic, not first-call setup
    run_criterion("AC-1 worked-example fidelity", 0.001, impl)


def test_ac2_metric_invariants():
    def impl():
        rng = random.Random(20260819)
        n_sets = 1000
        for _ in range(n_sets):
            # ds from random curves stays inside [-1, 1]
            m = rng.randint(2, 6)
            rec = degradation_score(
                curve([rng.random() for _ in range(m)], LERF),
                curve([rng.random() for _ in range(m)]),
            )
            assert -1.0 <= rec.ds <= 1.0

            # random multi-class record set: penalty range and alpha=0
            recs = []
            for c in range(rng.randint(2, 5)):
                for _ in range(rng.randint(1, 8)):
                    recs.append(record(rng.uniform(-1.0, 1.0), cls=c))
            per_class, overall = class_means(recs)
            delta = penalty(per_class)
            assert 0.0 <= delta <= 1.0
            assert class_adjusted_ds(overall, delta, 0.0) == overall

            # pairwise penalty collapses to the two-class form bit for bit
            d0, d1 = rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)
            assert penalty({0: d0, 1: d1}) == 0.5 * abs(d0 - d1)

            # balanced binary: full penalty leaves exactly the worse class,
            # checked on a dyadic grid where every mean is float-exact
            count = 2 ** rng.randint(0, 6)
            recs2 = [
                record(rng.randint(-(2**40), 2**40) * DYADIC, cls=c)
                for c in (0, 1)
                for _ in range(count)
            ]
            pc2, overall2 = class_means(recs2)
            assert class_adjusted_ds(overall2, penalty(pc2), 1.0) == min(pc2.values())
        return f"{n_sets} fuzzed record sets, all invariants hold"

    run_criterion("AC-2 metric invariants", 10.0, impl)


def test_ac3_oracle_equivalence():
    def impl():
        kinds = ["gauss", "unif", "opp", "inv", "submean", "zero", "constant"]
        rng = random.Random(7)
        for case in range(100):
            n = rng.randint(4, 32)
            ds = two_class_blobs(
                per_class=2, length=n, centers=(0.0, 1.0), noise=0.3, seed=case
            )
            h = fit_centroid(ds, temperature=4.0)
            ts = with_prediction(h, ds.instances[rng.randrange(4)])
            r = AttributionVector(
                series_id=ts.id,
                method="fuzz",
                target_class=ts.predicted_class,
                scores=np.asarray([rng.uniform(-1.0, 1.0) for _ in range(n)]),
            )
            kind = kinds[case % len(kinds)]
            strategy = (
                PerturbationStrategy(kind="constant", constant_value=rng.uniform(-2, 2))
                if kind == "constant"
                else PerturbationStrategy(kind=kind)
            )
            schedule = make_schedule(n, 0.1, 0.5)
            for direction in (MORF, LERF):
                fast = perturbation_curve(h, ts, r, strategy, schedule, direction, case)
                slow = brute_force_curve(h, ts, r, strategy, schedule, direction, case)
                assert np.array_equal(fast.probs, slow.probs), (case, direction)
                assert fast.base_prob == slow.base_prob

        # fixed arithmetic examples for the score itself
        assert degradation_score(curve([1.0, 1.0, 1.0], LERF), curve([0.0, 0.0, 0.0])).ds == 1.0
        assert degradation_score(curve([0.4, 0.7], LERF), curve([0.4, 0.7])).ds == 0.0
        mixed = degradation_score(curve([0.9, 0.8], LERF), curve([0.5, 0.2])).ds
        assert mixed == pytest.approx(0.5, abs=1e-12)
        return "100 fuzzed cases bitwise, all strategy kinds, both directions"

    run_criterion("AC-3 oracle equivalence", 30.0, impl)


def test_ac4_schedule_arithmetic():
    def impl():
        fixed = {500: (10, 250, 25), 152: (4, 76, 19), 96: (2, 48, 24)}
        for n, expected in fixed.items():
            s = make_schedule(n, 0.02, 0.5)
            assert (s.step_size, s.coverage_target, s.m) == expected, n
        return "(s, T, m) exact for N in {500, 152, 96}"

    run_criterion("AC-4 schedule arithmetic", None, impl)


def test_ac5_class_dependent_effect():
    def impl():
        dataset = two_class_blobs(
            per_class=200, length=64, centers=(0.0, 1.0), noise=0.1, seed=0,
            name="class-effect",
        )
        h = fit_centroid(dataset, temperature=0.05)
        schedule = make_schedule(64, 0.02, 0.5)
        strategies = (
            PerturbationStrategy(kind="zero"),
            PerturbationStrategy(kind="constant", constant_value=1.0),
        )
        recs = {s.name: [] for s in strategies}
        for ts in dataset.instances:
            ts = with_prediction(h, ts)
            r = occlusion_attribution(h, ts, ts.predicted_class)
            for strategy in strategies:
                recs[strategy.name].append(
                    evaluate_instance(h, ts, r, strategy, schedule, 0).record
                )
        zero_per, zero_overall = class_means(recs["zero"])
        const_per, _ = class_means(recs["constant:1.0"])
        zero_gap = zero_per[1] - zero_per[0]
        const_gap = const_per[1] - const_per[0]
        adjusted = class_adjusted_ds(zero_overall, penalty(zero_per), 1.0)
        detail = (
            f"zero gap {zero_gap:.6f} (need >= 0.3), constant gap {const_gap:.6f} "
            f"(need opposite sign), adjusted(1) {adjusted:.6f} vs "
            f"half-mean {0.5 * zero_overall:.6f}"
        )
        assert zero_gap >= 0.3, detail
        assert adjusted <= 0.5 * zero_overall, detail
        assert zero_gap * const_gap < 0.0, detail
        return detail

    run_criterion("AC-5 class-dependent effect", 60.0, impl)


def test_ac6_attribution_sanity():
    def impl():
        dataset = two_class_blobs(
            per_class=6, length=12, centers=(0.0, 1.0), noise=0.2, seed=9
        )
        model = fit_logistic(dataset, epochs=120, learning_rate=0.5)
        ts = with_prediction(model, dataset.instances[4])
        c = ts.predicted_class
        analytic = logistic_probability_gradient(model, np.asarray(ts.values), c)
        assert np.unique(np.abs(analytic)).size == analytic.size

        fd = fd_gradient_attribution(model, ts, c)
        assert naive_order(list(fd.scores), MORF) == naive_order(list(analytic), MORF)
        fd_abs = fd_gradient_attribution(model, ts, c, abs_scores=True)
        assert naive_order(list(fd_abs.scores), MORF) == naive_order(
            list(np.abs(analytic)), MORF
        )

        occ = occlusion_attribution(model, ts, c, w=1, v=0.0)
        base = float(model.predict_proba(ts.values)[0, c])
        drops = []
        for i in range(ts.length):
            probe = list(ts.values)
            probe[i] = 0.0
            drops.append(base - float(model.predict_proba(probe)[0, c]))
        assert int(np.argmax(occ.scores)) == int(np.argmax(drops))
        return "fd ranking matches analytic gradient; occlusion top-1 matches brute force"

    run_criterion("AC-6 attribution sanity", 10.0, impl)


def test_ac7_determinism(tmp_path):
    def impl():
        write_blob_dataset(tmp_path)
        # include both seeded replacement strategies so the rng path is covered
        cfg_path = write_config(
            tmp_path, base_config(strategies=["gauss", "unif", "zero"])
        )
        out = tmp_path / "out"
        assert main(["evaluate", "--config", str(cfg_path)]) == EXIT_OK
        names = ("summary.csv", "distributions.csv", "curves.csv")
        first = {name: (out / name).read_bytes() for name in names}
        assert main(["evaluate", "--config", str(cfg_path)]) == EXIT_OK
        for name in names:
            assert (out / name).read_bytes() == first[name], f"{name} changed"
        return "summary, distributions, curves byte-identical across reruns"

    run_criterion("AC-7 determinism", None, impl)


def test_ac8_protocol_conformance():
    def impl():
        # the evaluation package itself must not lean on the adapter package
        pkg_dir = Path(tsape.__file__).parent
        for source in pkg_dir.rglob("*.py"):
            text = source.read_text(encoding="utf-8")
            assert not re.search(r"^\s*(import|from)\s+adapter\b", text, re.M), source

        with spawn("--classes", "3", "--length", "8") as h:
            assert h.n_classes == 3
            assert h.series_length == 8
            assert h.batch_limit == 1024
            rows = np.asarray([[float(i + j) for j in range(8)] for i in range(4)])
            assert np.array_equal(h.predict_proba(rows), expected_rows(rows, 3))

        with spawn("--mode", "error-reply") as h:
            with pytest.raises(TransportError, match="model exploded"):
                h.predict_proba(np.zeros((1, 4)))

        with spawn("--mode", "reorder") as h:
            with pytest.raises(TransportError, match="reorder"):
                h.predict_proba(np.zeros((1, 4)))
        return "handshake, predict, error reply, id ordering all conform"

    run_criterion("AC-8 protocol conformance", None, impl)
