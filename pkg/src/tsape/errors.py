"""Exception taxonomy. The CLI maps these onto exit codes (see cli)."""

from __future__ import annotations


class HarnessError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(HarnessError):
    """Invalid configuration: bad file, bad field, out-of-range parameter."""


class DataError(HarnessError):
    """Invalid data: malformed dataset, inconsistent shapes, bad labels."""


class ParseError(DataError):
    """A file failed to parse; the message names the offending row/column."""


class DegenerateInputError(DataError):
    """Input whose statistics make a requested operation undefined."""


class TransportError(HarnessError):
    """External predictor failed: process, protocol, or response contents."""
