"""pyadapter: serve a Python batch-probability callable to an external evaluation client.

The package owns no model code.  It loads a user-supplied callable that maps a
batch of series (list of lists of floats) to one probability row per series,
and answers the newline-delimited JSON wire protocol (hello/ready, predict/probs,
error, bye) over stdio or TCP.  The server validates every reply before sending
it and stays alive through malformed requests and model exceptions.
"""

from .loader import AdapterError, resolve_model
from .server import PROTOCOL_VERSION, AdapterConfig, serve_stream, serve_stdio, serve_tcp

__all__ = [
    "AdapterError",
    "AdapterConfig",
    "PROTOCOL_VERSION",
    "resolve_model",
    "serve_stream",
    "serve_stdio",
    "serve_tcp",
]
