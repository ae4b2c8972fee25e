"""JSON serialization for lab reports (numpy scalars, tuples and non-finite floats)."""
from __future__ import annotations

import json
import math

import numpy as np


def _clean(obj):
    if hasattr(obj, "to_dict"):
        return _clean(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "inf" if x > 0 else "-inf" if x < 0 else "nan"
    return obj


def to_json(obj, indent: int = 2) -> str:
    return json.dumps(_clean(obj), indent=indent)
