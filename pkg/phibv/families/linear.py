"""Linear Φ-function φ(t) = t, the total variation case."""

from typing import Optional

import numpy as np

from phibv.data_model.domain import Domain
from phibv.families.base import Growth, PhiFunction


class Linear(PhiFunction):
    """φ(x, t) = t. The conjugate is ∞χ_(1,∞) and the recession function is 1."""

    id = "linear"
    name = "Linear"
    description = "Total variation integrand t"
    closedConjugate = True

    def __init__(self, domain: Optional[Domain] = None, growth: Optional[Growth] = None):
        super().__init__(
            domain, growth if growth is not None else Growth(1.0, 1.0, 1.0, 1.0)
        )

    def evaluate(self, x, t) -> np.ndarray:
        return np.asarray(t, dtype=float) + np.zeros(self.pointShape(x))

    def derivative(self, x, t) -> np.ndarray:
        return np.ones_like(np.asarray(t, dtype=float)) + np.zeros(self.pointShape(x))

    def conjugate(self, x, s) -> np.ndarray:
        s = np.asarray(s, dtype=float) + np.zeros(self.pointShape(x))
        return np.where(s <= 1.0, 0.0, np.inf)

    def recession(self, x) -> np.ndarray:
        return np.ones(self.pointShape(x))
