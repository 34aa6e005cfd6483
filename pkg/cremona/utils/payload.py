from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any, Dict

__all__ = ("update_payload", "dump_payload")


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)

    if isinstance(value, float) and not math.isfinite(value):
        return str(value)

    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}

    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]

    return value


def update_payload(payload: Dict[str, Any], **kwargs: Any) -> Dict[str, Any]:
    """
    Adds the keyword arguments that are not `None`, rationals written as `p/q`.
    """
    for key, value in kwargs.items():
        if value is not None:
            payload[key] = _jsonable(value)

    return payload


def dump_payload(payload: Dict[str, Any]) -> str:
    """
    Serializes a result object; key order is kept so reruns are byte-identical.
    """
    return json.dumps(_jsonable(payload), indent=2) + "\n"
