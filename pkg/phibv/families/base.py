"""Φ-function base class."""

import dataclasses
import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

import numpy as np

from phibv.data_model.domain import Domain
from phibv.data_model.fields import CoefficientField

log = logging.getLogger("phibv")


@dataclasses.dataclass(frozen=True)
class Growth:
    """Declared growth bounds: φ/t^p_inc almost increasing, φ/t^q_dec almost decreasing."""

    p_inc: Optional[float] = None
    q_dec: Optional[float] = None
    L_p: Optional[float] = None
    L_q: Optional[float] = None

    @classmethod
    def fromDict(cls, growthDict: Optional[Dict[str, Any]]) -> "Growth":
        """Create growth metadata from the Φ-spec ``growth`` entry."""
        if not growthDict:
            return cls()
        return cls(
            **{
                key: float(growthDict[key])
                for key in ["p_inc", "q_dec", "L_p", "L_q"]
                if growthDict.get(key) is not None
            }
        )

    def toDict(self) -> Dict[str, Optional[float]]:
        """Serialize growth metadata."""
        return dataclasses.asdict(self)


class PhiFunction(ABC):
    """Abstract convex Φ-function φ(x, t).

    Subclasses implement vectorized evaluation and left derivative; ``x`` and
    ``t`` broadcast against each other, with 2D points carrying a trailing axis
    of length 2. Instances are immutable after construction.
    """

    id: str = "abstract"
    name: str = "Abstract Φ-function"
    description: str = "Abstract Φ-function description"
    closedConjugate: bool = False

    def __init__(self, domain: Optional[Domain] = None, growth: Optional[Growth] = None):
        """Attach domain and growth metadata."""
        self._domain = domain
        self._growth = growth if growth is not None else Growth()

    @property
    def domain(self) -> Optional[Domain]:
        """Domain the Φ-function is defined on, if bound."""
        return self._domain

    @property
    def growth(self) -> Growth:
        """Declared growth metadata."""
        return self._growth

    @property
    def fields(self) -> Dict[str, CoefficientField]:
        """Coefficient fields by name."""
        return {}

    @property
    def dimension(self) -> int:
        """Dimension of the points φ is evaluated at."""
        if self._domain is not None:
            return self._domain.dimension
        for field in self.fields.values():
            return field.dimension
        return 1

    def pointShape(self, x) -> tuple:
        """Shape of a point array without the 2D coordinate axis."""
        x = np.asarray(x, dtype=float)
        return x.shape if self.dimension == 1 else x.shape[:-1]

    @property
    def isAutonomous(self) -> bool:
        """Whether φ does not depend on x."""
        return all(field.isConstant for field in self.fields.values())

    @property
    def singularPoints(self) -> np.ndarray:
        """Singular centres of all coefficient fields (1D)."""
        points = [field.singularPoints for field in self.fields.values()]
        if not points:
            return np.empty(0)
        return np.unique(np.concatenate(points))

    def _validate(self):
        """Check coefficient ranges on the bound domain."""
        if self._domain is None:
            return
        p = self.fields.get("p")
        if p is not None:
            pMin, _ = p.sampleRange(self._domain)
            if pMin < 1:
                log.error(f"Exponent field drops below 1 ({pMin})")
                raise ValueError(f"Exponent p(x) must be >= 1 everywhere, min is {pMin}.")
        a = self.fields.get("a")
        if a is not None:
            aMin, _ = a.sampleRange(self._domain)
            if aMin < 0:
                log.error(f"Weight field drops below 0 ({aMin})")
                raise ValueError(f"Weight a(x) must be >= 0 everywhere, min is {aMin}.")

    @abstractmethod
    def evaluate(self, x, t) -> np.ndarray:
        """Return φ(x, t).

        Parameters
        ----------
        x : array_like
            Points.
        t : array_like
            Nonnegative arguments.

        Returns
        -------
        np.ndarray
            Values in [0, ∞].
        """
        pass

    @abstractmethod
    def derivative(self, x, t) -> np.ndarray:
        """Return the left derivative φ'(x, t)."""
        pass

    def conjugate(self, x, s) -> np.ndarray:
        """Return φ*(x, s) = sup_t (st − φ(x, t)).

        The default is the numerical Legendre transform.
        """
        from phibv.conjugate import conjugate_numeric

        return conjugate_numeric(self, x, s)

    def recession(self, x) -> np.ndarray:
        """Return φ'_∞(x) = lim φ(x, t)/t.

        The default probes the difference quotient along t = 2^k.
        """
        from phibv.conjugate import recession_numeric

        return recession_numeric(self, x)

    def specDict(self) -> Dict[str, Any]:
        """Family specific part of the Φ-spec."""
        return {name: field.toDict() for name, field in self.fields.items()}

    def toDict(self) -> Dict[str, Any]:
        """Serialize to Φ-spec JSON."""
        out: Dict[str, Any] = {"family": self.id}
        out.update(self.specDict())
        out["growth"] = self._growth.toDict()
        if self._domain is not None:
            out["domain"] = self._domain.toDict()
        return out

    def __repr__(self) -> str:
        """Return string representation."""
        return f"{type(self).__name__}({self.specDict()})"


def conjugate_exponent(p: np.ndarray) -> np.ndarray:
    """Return p' = p/(p − 1), ∞ where p = 1."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 1, p / (p - 1), np.inf)


def safe_exp(logValue: np.ndarray) -> np.ndarray:
    """Exponential with overflow mapped to ∞ silently."""
    with np.errstate(over="ignore"):
        return np.exp(logValue)


def safe_log(t) -> np.ndarray:
    """Logarithm with log(0) = −∞ silently."""
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(t, dtype=float))
