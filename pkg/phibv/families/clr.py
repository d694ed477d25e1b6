"""Variable exponent growth for small energies, linear growth for large ones."""

from typing import Dict, Optional

import numpy as np

from phibv.data_model.domain import Domain
from phibv.data_model.fields import CoefficientField
from phibv.families.base import Growth, PhiFunction, conjugate_exponent, safe_exp, safe_log


class CLR(PhiFunction):
    """φ(x, t) = t^p(x)/p(x) on [0, 1] and t − 1 + 1/p(x) beyond.

    The function is C¹ across t = 1 and has slope one at infinity, so the
    recession function is 1 everywhere and BV^φ coincides with BV.
    """

    id = "clr"
    name = "CLR"
    description = "t^p/p for t <= 1, t - 1 + 1/p otherwise"
    closedConjugate = True

    def __init__(
        self,
        p: CoefficientField,
        domain: Optional[Domain] = None,
        growth: Optional[Growth] = None,
    ):
        super().__init__(domain, growth)
        self._p = p
        self._validate()

    @property
    def fields(self) -> Dict[str, CoefficientField]:
        return {"p": self._p}

    def evaluate(self, x, t) -> np.ndarray:
        p = self._p(x)
        t = np.asarray(t, dtype=float)
        small = np.minimum(t, 1.0)
        with np.errstate(divide="ignore"):
            head = np.where(small > 0, safe_exp(p * safe_log(small)), 0.0) / p
        return np.where(t <= 1.0, head, t - 1.0 + 1.0 / p)

    def derivative(self, x, t) -> np.ndarray:
        p = self._p(x)
        t = np.asarray(t, dtype=float)
        small = np.minimum(t, 1.0)
        head = np.where(
            p == 1.0, 1.0, np.where(small > 0, safe_exp((p - 1.0) * safe_log(small)), 0.0)
        )
        return np.where(t <= 1.0, head, 1.0)

    def conjugate(self, x, s) -> np.ndarray:
        """s^p'/p' on [0, 1] (zero when p = 1) and ∞ for s > 1."""
        p = self._p(x)
        s = np.asarray(s, dtype=float)
        pp = conjugate_exponent(p)
        with np.errstate(invalid="ignore"):
            logValue = pp * safe_log(np.minimum(s, 1.0)) - safe_log(pp)
            head = np.where(s > 0, safe_exp(logValue), 0.0)
        head = np.where(p > 1.0, head, 0.0)
        return np.where(s <= 1.0, head, np.inf)

    def recession(self, x) -> np.ndarray:
        return np.ones(self.pointShape(x))
