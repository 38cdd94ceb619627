import subprocess
import sys

import numpy as np
import pytest

from tsape import ExternalPredictor, TransportError

from conftest import mock_command
from mock_predictor import model_probs


def spawn(*extra, timeout=10.0):
    return ExternalPredictor.spawn(mock_command(*extra), timeout=timeout)


def expected_rows(series, n_classes):
    # the client renormalizes every row; mirror that exactly
    raw = np.asarray(model_probs(series, n_classes), dtype=np.float64)
    clipped = np.clip(raw, 0.0, 1.0)
    return clipped / clipped.sum(axis=1, keepdims=True)


# --- handshake ----------------------------------------------------------


def test_handshake_populates_handle():
    with spawn("--classes", "3", "--length", "8", "--batch-limit", "16") as h:
        assert h.kind == "external"
        assert h.n_classes == 3
        assert h.series_length == 8
        assert h.batch_limit == 16


def test_handshake_null_series_length():
    with spawn("--classes", "2") as h:
        assert h.series_length is None


def test_handshake_rejects_single_class():
    with pytest.raises(TransportError, match="n_classes"):
        spawn("--classes", "2", "--mode", "hello-bad")


def test_spawn_failure_is_transport_error():
    with pytest.raises(TransportError, match="spawn"):
        ExternalPredictor.spawn(["/nonexistent/predictor-binary"])


def test_connect_refused_is_transport_error():
    with pytest.raises(TransportError, match="connect"):
        ExternalPredictor.connect_tcp("127.0.0.1:1", timeout=2.0)


def test_bad_address_is_transport_error():
    with pytest.raises(TransportError, match="address"):
        ExternalPredictor.connect_tcp("no-port-here", timeout=2.0)


# --- predict round trips ------------------------------------------------


def test_predict_matches_served_model():
    series = [[0.5, 1.0, -0.5], [2.0, 2.0, 2.0]]
    with spawn("--classes", "3") as h:
        got = h.predict_proba(series)
    assert np.array_equal(got, expected_rows(series, 3))


def test_predict_chunks_respect_server_batch_limit():
    series = [[float(i), float(-i)] for i in range(5)]
    with spawn("--classes", "2", "--batch-limit", "2") as h:
        assert h.batch_limit == 2
        got = h.predict_proba(series)  # 3 requests; ids must increase
    assert got.shape == (5, 2)
    assert np.array_equal(got, expected_rows(series, 2))


def test_predict_over_tcp():
    proc = subprocess.Popen(
        mock_command("--classes", "2", "--tcp"),
        stdout=subprocess.PIPE,
        text=True,
    )
    try:
        port_line = proc.stdout.readline().strip()
        assert port_line.startswith("PORT ")
        address = f"127.0.0.1:{port_line.split()[1]}"
        series = [[1.0, -1.0], [0.25, 0.75]]
        with ExternalPredictor.connect_tcp(address, timeout=10.0) as h:
            got = h.predict_proba(series)
        assert np.array_equal(got, expected_rows(series, 2))
        assert proc.wait(timeout=5.0) == 0
    finally:
        if proc.poll() is None:
            proc.kill()
            proc.wait()


def test_close_sends_bye_and_server_exits_cleanly():
    h = spawn("--classes", "2")
    proc = h._transport.proc
    h.predict_proba([[1.0, 2.0]])
    h.close()
    assert proc.wait(timeout=5.0) == 0
    h.close()  # idempotent


# --- simplex validation at the boundary ---------------------------------


def test_near_simplex_rows_are_renormalized():
    series = [[0.5, 1.0], [3.0, -1.0]]
    with spawn("--classes", "2", "--mode", "near-simplex") as h:
        got = h.predict_proba(series)
    assert np.all(np.abs(got.sum(axis=1) - 1.0) < 1e-12)


def test_large_simplex_violation_is_fatal():
    with spawn("--classes", "2", "--mode", "bad-simplex") as h:
        with pytest.raises(TransportError, match="row sum"):
            h.predict_proba([[0.5, 1.0]])


# --- protocol violations ------------------------------------------------


def test_wrong_row_count_is_fatal():
    with spawn("--classes", "2", "--mode", "wrong-rows") as h:
        with pytest.raises(TransportError, match="shape"):
            h.predict_proba([[0.5, 1.0], [1.0, 0.5]])


def test_reordered_response_id_is_fatal():
    with spawn("--classes", "2", "--mode", "reorder") as h:
        with pytest.raises(TransportError, match="reorder"):
            h.predict_proba([[0.5, 1.0]])


def test_malformed_json_is_fatal():
    with spawn("--classes", "2", "--mode", "garbage") as h:
        with pytest.raises(TransportError, match="malformed"):
            h.predict_proba([[0.5, 1.0]])


def test_server_error_reply_is_surfaced():
    with spawn("--classes", "2", "--mode", "error-reply") as h:
        with pytest.raises(TransportError, match="model exploded"):
            h.predict_proba([[0.5, 1.0]])


def test_server_death_is_reported():
    with spawn("--classes", "2", "--mode", "die-after:1") as h:
        h.predict_proba([[0.5, 1.0]])  # first call is answered
        with pytest.raises(TransportError):
            h.predict_proba([[0.5, 1.0]])


def test_timeout_is_reported():
    with spawn("--classes", "2", "--mode", "hang", timeout=0.5) as h:
        with pytest.raises(TransportError, match="respond"):
            h.predict_proba([[0.5, 1.0]])


def _count_mock_processes():
    out = subprocess.run(
        ["pgrep", "-c", "-f", "mock_predictor.py"], capture_output=True, text=True
    )
    return int(out.stdout.strip() or 0)


def test_failed_handshake_does_not_leak_process():
    # the hello-bad server would otherwise idle on stdin forever
    before = _count_mock_processes()
    with pytest.raises(TransportError):
        spawn("--classes", "2", "--mode", "hello-bad")
    assert _count_mock_processes() == before
