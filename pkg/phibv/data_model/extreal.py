"""Nonnegative extended reals."""

import math
from typing import Union

import numpy as np

Number = Union[int, float, "ExtReal"]


class ExtReal(float):
    """Value in [0, ∞] with saturating arithmetic.

    ``finite + ∞ = ∞`` and ``0 · ∞ = 0``. Comparison is inherited from ``float``
    and therefore total on this range.
    """

    def __new__(cls, value: Union[float, str, int] = 0.0):
        """Create extended real from a number or from the string ``"inf"``."""
        if isinstance(value, str):
            value = float(value)
        value = float(value)
        if math.isnan(value) or value < 0:
            raise ValueError(f"ExtReal must lie in [0, inf], got {value}")
        return super().__new__(cls, value)

    @classmethod
    def inf(cls) -> "ExtReal":
        """Return +∞."""
        return cls(math.inf)

    @property
    def isInfinite(self) -> bool:
        """Whether the value is +∞."""
        return math.isinf(self)

    def __add__(self, other: Number) -> "ExtReal":
        """Add with saturation."""
        return ExtReal(float(self) + float(other))

    __radd__ = __add__

    def __mul__(self, other: Number) -> "ExtReal":
        """Multiply with ``0·∞ = 0``."""
        if float(self) == 0.0 or float(other) == 0.0:
            return ExtReal(0.0)
        return ExtReal(float(self) * float(other))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        """Return string representation."""
        return f"ExtReal({'inf' if self.isInfinite else float(self)!r})"

    def toJson(self) -> Union[float, str]:
        """Encode for JSON, ∞ becomes ``"inf"``."""
        return "inf" if self.isInfinite else float(self)

    @classmethod
    def fromJson(cls, value: Union[float, str]) -> "ExtReal":
        """Decode the JSON encoding of :meth:`toJson`."""
        return cls(value)


def ext_product(a, b) -> np.ndarray:
    """Elementwise product with the convention ``0·∞ = 0``.

    Parameters
    ----------
    a, b : array_like
        Nonnegative factors, possibly infinite.

    Returns
    -------
    np.ndarray
        Product array.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.where((a == 0.0) | (b == 0.0), 0.0, a * b)


def ext_sum(values) -> ExtReal:
    """Saturating sum of nonnegative values."""
    return ExtReal(float(np.sum(np.asarray(values, dtype=float))))
