"""Deterministic JSON/CSV emission and atomic file writes."""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any

import mpmath

from .groups import Element
from .scalar import QuadScalar

__all__ = ["jsonable", "dumps", "atomic_write", "tagged_decimal", "DECIMAL_DIGITS"]

DECIMAL_DIGITS = 15


def tagged_decimal(x, digits: int = DECIMAL_DIGITS) -> str:
    """An inexact real as text carrying its precision, e.g. ``0.6931 (4 digits)``."""
    return f"{mpmath.nstr(x, digits)} ({digits} digits)"


def jsonable(obj: Any) -> Any:
    """Convert library values to JSON-ready data; exact numbers become strings."""
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else int(obj)
    if isinstance(obj, QuadScalar):
        return str(obj)
    if isinstance(obj, Element):
        return obj.group.format(obj)
    if isinstance(obj, mpmath.mpf):
        return tagged_decimal(obj)
    if isinstance(obj, float):
        return tagged_decimal(obj, 12)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
