"""Autonomous Φ-functions: power profiles and tabulated convex profiles."""

import logging
from typing import Any, Dict, Optional

import numpy as np

from phibv.data_model.domain import Domain
from phibv.families.base import Growth, PhiFunction, conjugate_exponent, safe_exp, safe_log

log = logging.getLogger("phibv")


class Autonomous(PhiFunction):
    """φ(t) = c·t^q with c > 0 and q ≥ 1."""

    id = "autonomous"
    name = "Autonomous power"
    description = "c t^q"
    closedConjugate = True

    def __init__(
        self,
        coef: float = 1.0,
        exponent: float = 2.0,
        domain: Optional[Domain] = None,
        growth: Optional[Growth] = None,
    ):
        if coef <= 0 or exponent < 1:
            log.error(f"Invalid autonomous profile c={coef}, q={exponent}")
            raise ValueError(f"Autonomous profile needs c > 0 and q >= 1, got {coef}, {exponent}.")
        super().__init__(
            domain,
            growth if growth is not None else Growth(exponent, exponent, 1.0, 1.0),
        )
        self.coef = float(coef)
        self.exponent = float(exponent)

    def _broadcast(self, x, values) -> np.ndarray:
        return np.asarray(values, dtype=float) + np.zeros(self.pointShape(x))

    def evaluate(self, x, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self._broadcast(x, self.coef * np.power(t, self.exponent))

    def derivative(self, x, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.exponent == 1.0:
            return self._broadcast(x, np.full_like(t, self.coef))
        return self._broadcast(
            x, self.coef * self.exponent * np.power(t, self.exponent - 1.0)
        )

    def conjugate(self, x, s) -> np.ndarray:
        """∞χ_(c,∞) for q = 1 and (q − 1)·c·(s/(cq))^q' otherwise."""
        s = np.asarray(s, dtype=float)
        q, c = self.exponent, self.coef
        if q == 1.0:
            return self._broadcast(x, np.where(s <= c, 0.0, np.inf))
        qq = float(conjugate_exponent(q))
        logValue = np.log(q - 1.0) + np.log(c) + qq * (safe_log(s) - np.log(c * q))
        return self._broadcast(x, np.where(s > 0, safe_exp(logValue), 0.0))

    def recession(self, x) -> np.ndarray:
        return self._broadcast(x, self.coef if self.exponent == 1.0 else np.inf)

    def specDict(self) -> Dict[str, Any]:
        return {"coef": self.coef, "exponent": self.exponent}


class TabulatedConvex(PhiFunction):
    """Piecewise linear convex profile through sampled points.

    The profile passes through ``(0, 0)``, interpolates linearly between
    nodes and continues with the last slope past the final node. The
    conjugate of a piecewise linear function is the maximum over the nodes,
    so it is exact here.
    """

    id = "tabulated"
    name = "Tabulated convex"
    description = "Piecewise linear convex profile"
    closedConjugate = True

    def __init__(
        self,
        t,
        phi,
        domain: Optional[Domain] = None,
        growth: Optional[Growth] = None,
        tol: float = 1e-8,
    ):
        super().__init__(domain, growth)
        t = np.asarray(t, dtype=float)
        phi = np.asarray(phi, dtype=float)
        if t.ndim != 1 or t.shape != phi.shape or t.size < 1:
            raise ValueError("Tabulated profile needs matching 1D t and phi samples.")
        if t[0] != 0.0:
            t = np.concatenate([[0.0], t])
            phi = np.concatenate([[0.0], phi])
        if phi[0] != 0.0:
            log.error(f"Tabulated profile has phi(0) = {phi[0]}")
            raise ValueError("Tabulated profile must vanish at t = 0.")
        if t.size < 2 or np.any(np.diff(t) <= 0):
            log.error("Tabulated nodes are not strictly increasing")
            raise ValueError("Tabulated t samples must be strictly increasing and positive.")
        slopes = np.diff(phi) / np.diff(t)
        scale = max(1.0, float(np.max(np.abs(slopes))))
        if np.any(slopes < -tol * scale):
            log.error("Tabulated profile is decreasing")
            raise ValueError("Tabulated profile must be increasing.")
        if np.any(np.diff(slopes) < -tol * scale):
            worst = int(np.argmin(np.diff(slopes)))
            log.error(f"Tabulated profile not convex near t = {t[worst + 1]}")
            raise ValueError(f"Tabulated profile is not convex near t = {t[worst + 1]}.")

        self._t = t
        self._phi = phi
        self._slopes = np.maximum.accumulate(np.maximum(slopes, 0.0))
        for array in (self._t, self._phi, self._slopes):
            array.setflags(write=False)

    @property
    def nodes(self) -> np.ndarray:
        """Sample positions including t = 0."""
        return self._t

    def evaluate(self, x, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        inner = np.interp(t, self._t, self._phi)
        tail = self._phi[-1] + self._slopes[-1] * (t - self._t[-1])
        return np.where(t <= self._t[-1], inner, tail) + np.zeros(self.pointShape(x))

    def derivative(self, x, t) -> np.ndarray:
        """Backward difference quotient: slope of the piece ending at or after t."""
        t = np.asarray(t, dtype=float)
        k = np.clip(np.searchsorted(self._t, t, side="left"), 1, self._t.size - 1)
        return self._slopes[k - 1] + np.zeros(self.pointShape(x))

    def conjugate(self, x, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        values = np.max(s[..., None] * self._t - self._phi, axis=-1)
        return np.where(s <= self._slopes[-1], values, np.inf) + np.zeros(self.pointShape(x))

    def recession(self, x) -> np.ndarray:
        return np.full(self.pointShape(x), self._slopes[-1])

    def specDict(self) -> Dict[str, Any]:
        return {"t": self._t.tolist(), "phi": self._phi.tolist()}
