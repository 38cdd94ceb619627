"""Resolve a user model callable from a '<module-or-file>:<name>' spec string."""

from __future__ import annotations

import importlib
import importlib.util
import os


class AdapterError(Exception):
    """Configuration or model-loading failure."""


def resolve_model(spec: str):
    """Return the callable named by ``spec``.

    Two forms are accepted: ``package.module:callable`` imports a module from
    sys.path, ``path/to/file.py:callable`` loads a source file directly.  The
    named attribute must be callable.
    """
    if not isinstance(spec, str) or ":" not in spec:
        raise AdapterError(
            f"model spec must look like 'module:callable' or 'file.py:callable', got {spec!r}"
        )
    target, _, name = spec.rpartition(":")
    if not target or not name:
        raise AdapterError(f"model spec {spec!r} is missing the module or callable part")
    if target.endswith(".py"):
        if not os.path.isfile(target):
            raise AdapterError(f"model file not found: {target!r}")
        modspec = importlib.util.spec_from_file_location("_pyadapter_user_model", target)
        if modspec is None or modspec.loader is None:
            raise AdapterError(f"cannot load model file {target!r}")
        module = importlib.util.module_from_spec(modspec)
        try:
            modspec.loader.exec_module(module)
        except Exception as exc:
            raise AdapterError(f"model file {target!r} failed to import: {exc}") from exc
    else:
        try:
            module = importlib.import_module(target)
        except Exception as exc:
            raise AdapterError(f"model module {target!r} failed to import: {exc}") from exc
    try:
        fn = getattr(module, name)
    except AttributeError:
        raise AdapterError(f"module {target!r} has no attribute {name!r}") from None
    if not callable(fn):
        raise AdapterError(f"{spec!r} resolved to a non-callable {type(fn).__name__}")
    return fn
