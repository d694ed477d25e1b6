"""Double phase Φ-function t + a(x)t²."""

from typing import Dict, Optional

import numpy as np

from phibv.data_model.domain import Domain
from phibv.data_model.fields import CoefficientField
from phibv.families.base import Growth, PhiFunction


class DoublePhase(PhiFunction):
    """φ(x, t) = t + a(x) t².

    Linear growth where a vanishes, quadratic growth elsewhere. Jumps are only
    affordable inside ``{a = 0}``.
    """

    id = "double_phase"
    name = "Double phase"
    description = "t + a(x) t^2"
    closedConjugate = True

    def __init__(
        self,
        a: CoefficientField,
        domain: Optional[Domain] = None,
        growth: Optional[Growth] = None,
    ):
        super().__init__(
            domain, growth if growth is not None else Growth(1.0, 2.0, 1.0, 1.0)
        )
        self._a = a
        self._validate()

    @property
    def fields(self) -> Dict[str, CoefficientField]:
        return {"a": self._a}

    def weight(self, x) -> np.ndarray:
        """Return a(x)."""
        return self._a(x)

    def evaluate(self, x, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return t + self.weight(x) * t * t

    def derivative(self, x, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return 1.0 + 2.0 * self.weight(x) * t

    def conjugate(self, x, s) -> np.ndarray:
        """0 on [0, 1], (s − 1)²/(4a) beyond, ∞ beyond 1 where a = 0."""
        a = self.weight(x)
        s = np.asarray(s, dtype=float)
        excess = np.maximum(s - 1.0, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            quadratic = np.where(a > 0, excess * excess / (4.0 * a), np.inf)
        return np.where(s <= 1.0, 0.0, quadratic)

    def recession(self, x) -> np.ndarray:
        """1 on {a = 0}, ∞ elsewhere."""
        return np.where(self.weight(x) == 0.0, 1.0, np.inf)
