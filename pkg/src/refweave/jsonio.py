"""Canonical JSON emission: byte-deterministic, numbers capped at 3 decimals."""

from __future__ import annotations

import json
from typing import Any


def clean_number(x: float) -> float | int:
    """Round to 3 decimals and collapse integral floats to ints."""
    r = round(float(x), 3)
    if r == int(r):
        return int(r)
    return r


def _clean(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, float):
        return clean_number(value)
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_bytes(obj: Any, *, round_floats: bool = True) -> bytes:
    """Serialize ``obj`` preserving dict insertion order (= schema order).

    With ``round_floats`` off the caller is responsible for pre-rounded
    values; used where a derived number (e.g. a COCO area) must stay the
    exact product of its rounded factors.
    """
    if round_floats:
        obj = _clean(obj)
    text = json.dumps(obj, ensure_ascii=False, separators=(",", ":"), allow_nan=False)
    return text.encode("utf-8")


def load_json(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return json.loads(data)
