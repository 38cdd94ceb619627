"""Single-threaded wire-protocol server around a batch probability callable.

Protocol (newline-delimited JSON, one message per line):

  client -> {"type": "hello", "version": 1}
  server -> {"type": "ready", "n_classes": C, "series_length": N-or-null,
             "batch_limit": B}
  client -> {"type": "predict", "id": k, "series": [[...], ...]}
  server -> {"type": "probs", "id": k, "probs": [[...], ...]}
  client -> {"type": "bye"}            server closes the stream

One request is in flight at a time and request ids must increase strictly
within a connection; replies echo the request id.  Every failure, whether a
malformed request, a batch the server refuses, or an exception raised by the
model, is answered with {"type": "error", "id": k-or-null, "message": ...}
and the process keeps serving.  Probability rows returned by the model are
checked before sending: rectangular, one row per input series, finite entries
in [0, 1], each row summing to 1 within SUM_TOLERANCE.
"""

from __future__ import annotations

import json
import math
import socket
import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, TextIO

from .loader import AdapterError

PROTOCOL_VERSION = 1
SUM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class AdapterConfig:
    """What the server declares in the handshake and how it calls the model.

    model takes one batch (list of equal-length lists of floats) and returns
    one probability row of length n_classes per input series.  series_length
    None means the server accepts any rectangular batch.
    """

    model: Callable[[list], Sequence[Sequence[float]]]
    n_classes: int
    series_length: Optional[int] = None
    batch_limit: int = 1024

    def __post_init__(self) -> None:
        if not callable(self.model):
            raise AdapterError("model must be callable")
        if not isinstance(self.n_classes, int) or isinstance(self.n_classes, bool):
            raise AdapterError("n_classes must be an int")
        if self.n_classes < 2:
            raise AdapterError(f"n_classes must be >= 2, got {self.n_classes}")
        if self.series_length is not None:
            if not isinstance(self.series_length, int) or isinstance(self.series_length, bool):
                raise AdapterError("series_length must be an int or None")
            if self.series_length < 2:
                raise AdapterError(f"series_length must be >= 2, got {self.series_length}")
        if not isinstance(self.batch_limit, int) or isinstance(self.batch_limit, bool):
            raise AdapterError("batch_limit must be an int")
        if self.batch_limit < 1:
            raise AdapterError(f"batch_limit must be >= 1, got {self.batch_limit}")


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _send(out: TextIO, message: dict) -> None:
    out.write(json.dumps(message, allow_nan=False) + "\n")
    out.flush()


def _error(out: TextIO, request_id, message: str) -> None:
    _send(out, {"type": "error", "id": request_id, "message": message})


def _parse_batch(series, config: AdapterConfig) -> tuple[Optional[list], Optional[str]]:
    """Validate the series field of a predict request.  Returns (batch, error)."""
    if not isinstance(series, list):
        return None, "series must be a list of series"
    if len(series) > config.batch_limit:
        return None, f"batch of {len(series)} exceeds batch_limit {config.batch_limit}"
    batch = []
    width = None
    for i, row in enumerate(series):
        if not isinstance(row, list) or not row:
            return None, f"series {i} must be a nonempty list of numbers"
        if width is None:
            width = len(row)
        elif len(row) != width:
            return None, f"series {i} has length {len(row)}, series 0 has {width}"
        values = []
        for v in row:
            if not _is_number(v) or not math.isfinite(v):
                return None, f"series {i} contains a non-finite or non-numeric value"
            values.append(float(v))
        batch.append(values)
    if config.series_length is not None and width is not None and width != config.series_length:
        return None, f"series length {width} does not match declared length {config.series_length}"
    return batch, None


def _validate_output(out_rows, n_rows: int, config: AdapterConfig) -> tuple[Optional[list], Optional[str]]:
    """Check the model's return value before it goes on the wire."""
    try:
        rows = [[float(v) for v in row] for row in out_rows]
    except Exception:
        return None, "model output is not a sequence of numeric rows"
    if len(rows) != n_rows:
        return None, f"model returned {len(rows)} rows for {n_rows} series"
    for i, row in enumerate(rows):
        if len(row) != config.n_classes:
            return None, f"model row {i} has {len(row)} entries, expected {config.n_classes}"
        total = 0.0
        for v in row:
            if not math.isfinite(v):
                return None, f"model row {i} contains a non-finite value"
            if v < -SUM_TOLERANCE or v > 1.0 + SUM_TOLERANCE:
                return None, f"model row {i} has an entry outside [0, 1]"
            total += v
        if abs(total - 1.0) > SUM_TOLERANCE:
            return None, f"model row {i} sums to {total!r}, expected 1 within {SUM_TOLERANCE}"
    return rows, None


def serve_stream(config: AdapterConfig, rin: TextIO, rout: TextIO) -> int:
    """Serve one connection until bye or EOF.  Never raises on bad input."""
    last_id = -1
    for line in rin:
        line = line.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
        except Exception:
            _error(rout, None, "malformed request: not valid JSON")
            continue
        if not isinstance(msg, dict):
            _error(rout, None, "malformed request: not a JSON object")
            continue
        mtype = msg.get("type")
        if mtype == "hello":
            if msg.get("version") != PROTOCOL_VERSION:
                _error(rout, None, f"unsupported protocol version {msg.get('version')!r}")
                continue
            _send(
                rout,
                {
                    "type": "ready",
                    "n_classes": config.n_classes,
                    "series_length": config.series_length,
                    "batch_limit": config.batch_limit,
                },
            )
        elif mtype == "bye":
            return 0
        elif mtype == "predict":
            rid = msg.get("id")
            if not isinstance(rid, int) or isinstance(rid, bool) or rid < 0:
                _error(rout, None, "predict id must be a nonnegative integer")
                continue
            if rid <= last_id:
                _error(rout, rid, f"request ids must increase strictly, already saw {last_id}")
                continue
            last_id = rid
            batch, err = _parse_batch(msg.get("series"), config)
            if err is not None:
                _error(rout, rid, err)
                continue
            if not batch:
                _send(rout, {"type": "probs", "id": rid, "probs": []})
                continue
            try:
                raw = config.model(batch)
            except Exception as exc:
                _error(rout, rid, f"model raised {type(exc).__name__}: {exc}")
                continue
            rows, err = _validate_output(raw, len(batch), config)
            if err is not None:
                _error(rout, rid, err)
                continue
            _send(rout, {"type": "probs", "id": rid, "probs": rows})
        else:
            rid = msg.get("id")
            if not isinstance(rid, int) or isinstance(rid, bool):
                rid = None
            _error(rout, rid, f"unknown message type {mtype!r}")
    return 0


def serve_stdio(config: AdapterConfig) -> int:
    return serve_stream(config, sys.stdin, sys.stdout)


def parse_address(address: str) -> tuple[str, int]:
    host, sep, port = address.rpartition(":")
    if not sep or not host:
        raise AdapterError(f"tcp address must look like 'host:port', got {address!r}")
    try:
        port_num = int(port)
    except ValueError:
        raise AdapterError(f"tcp port must be an integer, got {port!r}") from None
    if not 0 <= port_num <= 65535:
        raise AdapterError(f"tcp port out of range: {port_num}")
    return host, port_num


def serve_tcp(config: AdapterConfig, address: str, announce: Optional[TextIO] = None) -> int:
    """Bind and serve connections one at a time until interrupted.

    Port 0 binds an ephemeral port; the chosen port is announced as a
    'PORT {n}' line (stdout by default) so a parent process can read it.
    """
    host, port = parse_address(address)
    announce = sys.stdout if announce is None else announce
    with socket.create_server((host, port)) as server:
        bound = server.getsockname()[1]
        announce.write(f"PORT {bound}\n")
        announce.flush()
        try:
            while True:
                conn, _ = server.accept()
                with conn:
                    rin = conn.makefile("r", encoding="utf-8", newline="\n")
                    rout = conn.makefile("w", encoding="utf-8", newline="\n")
                    try:
                        serve_stream(config, rin, rout)
                    except (BrokenPipeError, ConnectionResetError):
                        pass
        except KeyboardInterrupt:
            return 0
