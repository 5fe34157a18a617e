"""
Utility functions for the epoint toolkit.

This module contains helpers for angle canonicalization, finiteness checks,
vector geometry, numeric input validation and deterministic JSON/number
formatting.
"""

import cmath
import json
import logging
import math
from enum import Enum
from typing import Any, Dict, Iterable, Tuple

import numpy as np

from config import FLOAT_DIGITS
from errors import InvalidArgumentError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


def canonical_angle(angle: float) -> float:
    """Maps an angle in radians onto [-pi, pi)."""
    wrapped = (angle + math.pi) % TWO_PI - math.pi
    # % can round up to exactly 2*pi for tiny negative inputs
    if wrapped >= math.pi:
        wrapped -= TWO_PI
    return wrapped


def principal_arg(z: complex) -> float:
    """Argument of z on the principal branch [-pi, pi)."""
    return canonical_angle(cmath.phase(z))


def ensure_finite(*values: Any, what: str = "input") -> None:
    """Raises InvalidArgumentError unless every value is a finite number."""
    for value in values:
        if not np.all(np.isfinite(value)):
            raise InvalidArgumentError(f"{what} must be finite, got {value!r}")


def frobenius(m: np.ndarray) -> float:
    """Frobenius norm of a matrix (or Euclidean norm of a vector)."""
    return float(np.sqrt(np.sum(np.abs(m) ** 2)))


def unit(v: np.ndarray) -> np.ndarray:
    """Scales v to unit Euclidean norm."""
    norm = frobenius(v)
    if norm == 0.0:
        raise InvalidArgumentError("cannot normalize the zero vector")
    return v / norm


def collinearity_defect(u: np.ndarray, v: np.ndarray) -> float:
    """Sine of the angle between two vectors of C^2, 0 for collinear vectors."""
    norm = frobenius(u) * frobenius(v)
    if norm == 0.0:
        raise InvalidArgumentError("collinearity of a zero vector is undefined")
    return abs(u[0] * v[1] - u[1] * v[0]) / norm


def validate_numeric_input(value: Any, min_val: float, max_val: float,
                           field_name: str) -> Tuple[bool, float, str]:
    """Checks a numeric input and returns (ok, value, error message)."""
    try:
        number = float(value)
    except (TypeError, ValueError):
        return False, 0.0, f"{field_name} must be a number, got {value!r}."
    if not math.isfinite(number):
        return False, 0.0, f"{field_name} must be finite."
    if min_val <= number <= max_val:
        return True, number, ""
    return False, 0.0, f"{field_name} must be between {min_val} and {max_val}."


def format_float(x: float) -> str:
    """Formats a float with enough significant digits to round-trip."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, f".{FLOAT_DIGITS}g")


def complex_to_json(z: complex) -> Dict[str, float]:
    """Serializes a complex number as {"re": x, "im": y}."""
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def complex_from_json(obj: Any) -> complex:
    """Parses {"re": x, "im": y}, a bare number, or a [re, im] pair."""
    if isinstance(obj, dict):
        if "re" not in obj and "im" not in obj:
            raise InvalidArgumentError(f"complex number needs 're'/'im' keys: {obj!r}")
        z = complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    elif isinstance(obj, (list, tuple)) and len(obj) == 2:
        z = complex(float(obj[0]), float(obj[1]))
    elif isinstance(obj, (int, float)) and not isinstance(obj, bool):
        z = complex(obj)
    else:
        raise InvalidArgumentError(f"not a complex number: {obj!r}")
    ensure_finite(z, what="complex value")
    return z


def vector_to_json(v: Iterable[complex]) -> list:
    """Serializes a complex vector component by component."""
    return [complex_to_json(component) for component in v]


def dumps_json(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text: sorted keys, 17 significant digits, LF ending."""
    return _encode(obj, 0, indent) + "\n"


def _encode(obj: Any, level: int, indent: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, Enum):
        return _encode(obj.value, level, indent)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        text = format_float(obj)
        return text if math.isfinite(obj) else json.dumps(text)
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode(complex_to_json(obj), level, indent)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), level, indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted(obj.items(), key=lambda item: str(item[0]))
        body = ",\n".join(
            f"{pad}{json.dumps(str(key), ensure_ascii=False)}: "
            f"{_encode(value, level + 1, indent)}"
            for key, value in items
        )
        return "{\n" + body + "\n" + close + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        body = ",\n".join(f"{pad}{_encode(item, level + 1, indent)}" for item in obj)
        return "[\n" + body + "\n" + close + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def sign_value(sign: Any) -> int:
    """Maps a branch label ('+', '-', +1, -1) onto +1 or -1."""
    if sign in ("+", 1, "plus"):
        return 1
    if sign in ("-", -1, "minus"):
        return -1
    raise InvalidArgumentError(f"branch sign must be '+' or '-', got {sign!r}")


def sign_label(sign: Any) -> str:
    return "+" if sign_value(sign) > 0 else "-"
