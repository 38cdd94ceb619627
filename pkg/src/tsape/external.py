"""Client for external predictors over a newline-delimited JSON protocol.

One UTF-8 JSON message per line, over a spawned subprocess's stdin/stdout
or a TCP stream:

    handshake  client: {"type": "hello", "version": 1}
               server: {"type": "ready", "n_classes": C,
                        "series_length": N or null, "batch_limit": B}
    request    {"type": "predict", "id": <nonneg int>, "series": [[...], ...]}
    response   {"type": "probs", "id": <same>, "probs": [[...], ...]}
    error      {"type": "error", "id": <int or null>, "message": "..."}
    shutdown   {"type": "bye"}   (optional)

Request ids are strictly increasing per connection and responses may not be
reordered, so exactly one request is in flight at a time. Returned rows
whose entries stray from the probability simplex by at most 1e-6 are
renormalized (float serialization loss); larger violations are hard errors
rather than silently repaired.

Requests are serialized per connection with a lock; callers that want
parallel external prediction should open multiple handles.
"""

from __future__ import annotations

import json
import queue
import socket
import subprocess
import threading

import numpy as np

from .errors import TransportError
from .predict import Predictor, _as_batch

PROTOCOL_VERSION = 1
SIMPLEX_TOLERANCE = 1e-6
_DEFAULT_TIMEOUT = 60.0


def _encode(message: dict) -> str:
    return json.dumps(message, separators=(",", ":"), ensure_ascii=False) + "\n"


class _StdioTransport:
    """Spawned subprocess; a reader thread feeds a queue so that reads can
    time out and still surface the child's stderr in diagnostics."""

    def __init__(self, command: list[str], timeout: float) -> None:
        self.timeout = timeout
        try:
            self.proc = subprocess.Popen(
                command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise TransportError(f"cannot spawn predictor {command!r}: {exc}") from exc
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._stderr_lines: list[str] = []
        threading.Thread(target=self._read_stdout, daemon=True).start()
        threading.Thread(target=self._read_stderr, daemon=True).start()

    def _read_stdout(self) -> None:
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _read_stderr(self) -> None:
        for line in self.proc.stderr:
            self._stderr_lines.append(line.rstrip("\n"))

    def _diagnostic(self) -> str:
        tail = self._stderr_lines[-5:]
        return ("; stderr: " + " | ".join(tail)) if tail else ""

    def send_line(self, line: str) -> None:
        try:
            self.proc.stdin.write(line)
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise TransportError(
                f"predictor process closed stdin: {exc}{self._diagnostic()}"
            ) from exc

    def recv_line(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise TransportError(
                f"predictor did not respond within {self.timeout}s{self._diagnostic()}"
            ) from None
        if line is None:
            code = self.proc.poll()
            raise TransportError(
                f"predictor process ended (exit code {code}){self._diagnostic()}"
            )
        return line

    def close(self) -> None:
        for stream in (self.proc.stdin,):
            try:
                stream.close()
            except OSError:
                pass
        try:
            self.proc.wait(timeout=2.0)
        except subprocess.TimeoutExpired:
            self.proc.terminate()
            try:
                self.proc.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                self.proc.kill()


class _TcpTransport:
    def __init__(self, address: str, timeout: float) -> None:
        host, _, port = address.rpartition(":")
        if not host or not port.isdigit():
            raise TransportError(f"bad TCP address {address!r}; expected host:port")
        try:
            self.sock = socket.create_connection((host, int(port)), timeout=timeout)
        except OSError as exc:
            raise TransportError(f"cannot connect to predictor at {address}: {exc}") from exc
        self.sock.settimeout(timeout)
        self._file = self.sock.makefile("rw", encoding="utf-8", newline="\n")

    def send_line(self, line: str) -> None:
        try:
            self._file.write(line)
            self._file.flush()
        except OSError as exc:
            raise TransportError(f"TCP send failed: {exc}") from exc

    def recv_line(self) -> str:
        try:
            line = self._file.readline()
        except socket.timeout:
            raise TransportError("predictor did not respond within the timeout") from None
        except OSError as exc:
            raise TransportError(f"TCP receive failed: {exc}") from exc
        if line == "":
            raise TransportError("predictor closed the connection")
        return line

    def close(self) -> None:
        try:
            self._file.close()
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass


class ExternalPredictor(Predictor):
    """Predictor handle backed by an external process or TCP service."""

    kind = "external"

    def __init__(self, transport, description: str) -> None:
        self._transport = transport
        self._description = description
        self._lock = threading.Lock()
        self._next_id = 0
        self._closed = False
        try:
            ready = self._round_trip({"type": "hello", "version": PROTOCOL_VERSION})
            if ready.get("type") != "ready":
                raise TransportError(f"expected ready message, got {ready!r}")
            n_classes = ready.get("n_classes")
            series_length = ready.get("series_length")
            batch_limit = ready.get("batch_limit")
            if not isinstance(n_classes, int) or n_classes < 2:
                raise TransportError(
                    f"ready.n_classes must be an int >= 2, got {n_classes!r}"
                )
            if series_length is not None and (
                not isinstance(series_length, int) or series_length < 2
            ):
                raise TransportError(
                    f"ready.series_length must be null or an int >= 2, got {series_length!r}"
                )
            if not isinstance(batch_limit, int) or batch_limit < 1:
                raise TransportError(
                    f"ready.batch_limit must be an int >= 1, got {batch_limit!r}"
                )
        except BaseException:
            # a failed handshake must not leak the process/socket
            self._transport.close()
            raise
        self.n_classes = n_classes
        self.series_length = series_length
        self.batch_limit = batch_limit

    @classmethod
    def spawn(cls, command: list[str], timeout: float = _DEFAULT_TIMEOUT) -> "ExternalPredictor":
        return cls(_StdioTransport(command, timeout), f"external({' '.join(command)})")

    @classmethod
    def connect_tcp(cls, address: str, timeout: float = _DEFAULT_TIMEOUT) -> "ExternalPredictor":
        return cls(_TcpTransport(address, timeout), f"external(tcp {address})")

    def _round_trip(self, message: dict) -> dict:
        self._transport.send_line(_encode(message))
        line = self._transport.recv_line()
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TransportError(f"predictor sent malformed JSON: {line!r}") from exc
        if not isinstance(reply, dict):
            raise TransportError(f"predictor sent a non-object message: {reply!r}")
        if reply.get("type") == "error":
            raise TransportError(
                f"predictor error (id={reply.get('id')}): {reply.get('message')}"
            )
        return reply

    def _predict_chunk(self, arr: np.ndarray) -> np.ndarray:
        request_id = self._next_id
        self._next_id += 1
        reply = self._round_trip(
            {"type": "predict", "id": request_id, "series": arr.tolist()}
        )
        if reply.get("type") != "probs":
            raise TransportError(f"expected probs message, got {reply!r}")
        if reply.get("id") != request_id:
            raise TransportError(
                f"response id {reply.get('id')!r} does not match request id "
                f"{request_id} (responses must not reorder)"
            )
        probs = reply.get("probs")
        try:
            out = np.asarray(probs, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise TransportError(f"probs rows are not numeric: {exc}") from exc
        if out.ndim != 2 or out.shape != (arr.shape[0], self.n_classes):
            raise TransportError(
                f"expected probs of shape {(arr.shape[0], self.n_classes)}, "
                f"got {getattr(out, 'shape', None)}"
            )
        return self._validate_rows(out, request_id)

    @staticmethod
    def _validate_rows(out: np.ndarray, request_id: int) -> np.ndarray:
        if not np.all(np.isfinite(out)):
            raise TransportError(f"response {request_id}: non-finite probability")
        if np.any(out < -SIMPLEX_TOLERANCE) or np.any(out > 1.0 + SIMPLEX_TOLERANCE):
            raise TransportError(
                f"response {request_id}: probability outside [0, 1] beyond tolerance"
            )
        sums = out.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > SIMPLEX_TOLERANCE):
            worst = float(np.max(np.abs(sums - 1.0)))
            raise TransportError(
                f"response {request_id}: row sum off by {worst:.3g} (> {SIMPLEX_TOLERANCE})"
            )
        clipped = np.clip(out, 0.0, 1.0)
        return clipped / clipped.sum(axis=1, keepdims=True)

    def predict_proba(self, batch) -> np.ndarray:
        arr = _as_batch(batch, self.series_length)
        with self._lock:
            chunks = [
                self._predict_chunk(arr[i : i + self.batch_limit])
                for i in range(0, arr.shape[0], self.batch_limit)
            ]
        return np.concatenate(chunks, axis=0) if len(chunks) > 1 else chunks[0]

    def describe(self) -> str:
        return self._description

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        try:
            self._transport.send_line(_encode({"type": "bye"}))
        except TransportError:
            pass
        self._transport.close()

    def __enter__(self) -> "ExternalPredictor":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
