"""Variable exponent Φ-functions t^p(x) and t^p(x)/p(x)."""

from typing import Dict, Optional

import numpy as np

from phibv.data_model.domain import Domain
from phibv.data_model.fields import CoefficientField
from phibv.families.base import (
    Growth,
    PhiFunction,
    conjugate_exponent,
    safe_exp,
    safe_log,
)


class _VariableExponent(PhiFunction):
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

    def exponent(self, x) -> np.ndarray:
        """Return p(x)."""
        return self._p(x)

    def _power(self, t, p) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            return np.where(t > 0, safe_exp(p * safe_log(np.maximum(t, 0.0))), 0.0)

    def recession(self, x) -> np.ndarray:
        """1 on {p = 1}, ∞ elsewhere."""
        return np.where(self.exponent(x) == 1.0, 1.0, np.inf)

    @staticmethod
    def _linearConjugate(s: np.ndarray) -> np.ndarray:
        return np.where(s <= 1.0, 0.0, np.inf)


class PowerVarExp(_VariableExponent):
    """φ(x, t) = t^p(x)."""

    id = "power_varexp"
    name = "Variable exponent"
    description = "t^p(x)"

    def evaluate(self, x, t) -> np.ndarray:
        return self._power(t, self.exponent(x))

    def derivative(self, x, t) -> np.ndarray:
        p = self.exponent(x)
        return np.where(p == 1.0, 1.0, p * self._power(t, p - 1.0))

    def conjugate(self, x, s) -> np.ndarray:
        """(p − 1) p^(−p') s^p' for p > 1 and ∞χ_(1,∞) for p = 1."""
        p = self.exponent(x)
        s = np.asarray(s, dtype=float)
        pp = conjugate_exponent(p)
        with np.errstate(invalid="ignore", divide="ignore"):
            logValue = safe_log(np.maximum(p - 1.0, 0.0)) + pp * (
                safe_log(s) - safe_log(p)
            )
            closed = np.where(s > 0, safe_exp(logValue), 0.0)
        return np.where(p > 1.0, closed, self._linearConjugate(s))


class NormalizedVarExp(_VariableExponent):
    """φ(x, t) = t^p(x)/p(x)."""

    id = "normalized_varexp"
    name = "Normalized variable exponent"
    description = "t^p(x)/p(x)"

    def evaluate(self, x, t) -> np.ndarray:
        p = self.exponent(x)
        return self._power(t, p) / p

    def derivative(self, x, t) -> np.ndarray:
        p = self.exponent(x)
        return np.where(p == 1.0, 1.0, self._power(t, p - 1.0))

    def conjugate(self, x, s) -> np.ndarray:
        """s^p'/p' for p > 1 and ∞χ_(1,∞) for p = 1.

        Evaluated as exp(p' log s − log p') so that large conjugate exponents
        near p = 1 overflow to ∞ instead of producing nan.
        """
        p = self.exponent(x)
        s = np.asarray(s, dtype=float)
        pp = conjugate_exponent(p)
        with np.errstate(invalid="ignore"):
            logValue = pp * safe_log(s) - safe_log(pp)
            closed = np.where(s > 0, safe_exp(logValue), 0.0)
        return np.where(p > 1.0, closed, self._linearConjugate(s))
