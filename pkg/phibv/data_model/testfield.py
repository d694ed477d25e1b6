"""Compactly supported piecewise linear test fields on the line."""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from phibv.data_model.domain import Domain
from phibv.errors import DomainError, ShapeError

log = logging.getLogger("phibv")


class TestField(ABC):
    """Lipschitz field w vanishing outside a compact interval.

    Every field is piecewise linear between its breakpoints, so integrals
    over arbitrary intervals are exact.
    """

    __test__ = False  # not a pytest class

    kind: str = "abstract"

    @property
    @abstractmethod
    def knots(self) -> Tuple[np.ndarray, np.ndarray]:
        """Sorted knot positions and the values there, zero at both ends."""
        pass

    @property
    def breakpoints(self) -> np.ndarray:
        """Kinks of w."""
        return self.knots[0]

    @property
    def support(self) -> Tuple[float, float]:
        """Closed interval outside of which w vanishes."""
        xs, _ = self.knots
        return float(xs[0]), float(xs[-1])

    def __call__(self, x) -> np.ndarray:
        """Evaluate w."""
        xs, ys = self.knots
        return np.interp(np.asarray(x, dtype=float), xs, ys, left=0.0, right=0.0)

    def antiderivative(self, x) -> np.ndarray:
        """∫_{−∞}^x w, exact."""
        xs, ys = self.knots
        x = np.asarray(x, dtype=float)
        cumulative = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(xs) * (ys[:-1] + ys[1:]))])
        k = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(xs) - 1)
        xk = xs[k]
        partial = 0.5 * (np.clip(x, xs[0], xs[-1]) - xk) * (ys[k] + self(np.clip(x, xs[0], xs[-1])))
        return cumulative[k] + np.where(x >= xs[0], partial, 0.0)

    def integrate(self, a, b) -> np.ndarray:
        """∫_a^b w, vectorized over interval bounds."""
        return self.antiderivative(b) - self.antiderivative(a)

    @property
    def maxAbs(self) -> float:
        """sup |w|."""
        return float(np.max(np.abs(self.knots[1])))

    def isInside(self, domain: Domain, collar: float = 0.0) -> bool:
        """Whether the support keeps a distance ``collar`` from the boundary."""
        lo, hi = domain.extent[0]
        a, b = self.support
        tol = 1e-12 * (hi - lo)
        return a >= lo + collar - tol and b <= hi - collar + tol

    @abstractmethod
    def scaled(self, c: float) -> "TestField":
        """Return c·w."""
        pass

    @abstractmethod
    def toDict(self) -> Dict[str, Any]:
        """Serialize field."""
        pass


class TrapezoidBump(TestField):
    """Plateau of height M on |x − x₀| ≤ δ', linear ramps to zero at |x − x₀| = δ.

    A negative height flips the orientation.
    """

    kind = "trapezoid"

    def __init__(self, center: float, plateau: float, support: float, height: float):
        if not 0.0 <= plateau < support:
            log.error(f"Invalid trapezoid widths {plateau}, {support}")
            raise ValueError(f"Trapezoid needs 0 <= plateau < support, got {plateau}, {support}.")
        self.center = float(center)
        self.plateau = float(plateau)
        self.halfWidth = float(support)
        self.height = float(height)
        c, p, s, m = self.center, self.plateau, self.halfWidth, self.height
        if p > 0:
            xs = np.array([c - s, c - p, c + p, c + s])
            ys = np.array([0.0, m, m, 0.0])
        else:
            xs = np.array([c - s, c, c + s])
            ys = np.array([0.0, m, 0.0])
        self._knots = (xs, ys)

    @property
    def knots(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._knots

    def scaled(self, c: float) -> "TrapezoidBump":
        return TrapezoidBump(self.center, self.plateau, self.halfWidth, c * self.height)

    def toDict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "center": self.center,
            "plateau": self.plateau,
            "support": self.halfWidth,
            "height": self.height,
        }

    def __repr__(self) -> str:
        """Return string representation."""
        return (
            f"TrapezoidBump(center={self.center}, plateau={self.plateau}, "
            f"support={self.halfWidth}, height={self.height})"
        )


class NodalField(TestField):
    """Piecewise linear interpolant of values on the 1D grid nodes.

    The two outermost nodes on each side are forced to zero, so w vanishes on
    a collar of one cell.
    """

    kind = "nodal"

    def __init__(self, domain: Domain, values):
        if domain.dimension != 1:
            raise DomainError("Nodal test fields are one-dimensional.")
        values = np.array(values, dtype=float)
        if values.shape != (domain.n + 1,):
            log.error(f"Nodal values of shape {values.shape} on {domain.n} cells")
            raise ShapeError(f"Need {domain.n + 1} nodal values, got {values.shape}.")
        values[:2] = 0.0
        values[-2:] = 0.0
        values.setflags(write=False)
        self.domain = domain
        self.values = values
        self._knots = (domain.nodes, values)

    @property
    def knots(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._knots

    @property
    def support(self) -> Tuple[float, float]:
        nonzero = np.flatnonzero(self.values)
        nodes = self.domain.nodes
        if nonzero.size == 0:
            mid = float(nodes[len(nodes) // 2])
            return mid, mid
        return float(nodes[nonzero[0] - 1]), float(nodes[nonzero[-1] + 1])

    def cellIntegrals(self) -> np.ndarray:
        """∫ w over every cell."""
        return 0.5 * self.domain.h * (self.values[:-1] + self.values[1:])

    def scaled(self, c: float) -> "NodalField":
        return NodalField(self.domain, c * self.values)

    def toDict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "values": self.values.tolist()}


class CompositeField(TestField):
    """Sum of test fields."""

    kind = "composite"

    def __init__(self, fields: Sequence[TestField]):
        self.fields: List[TestField] = [f for f in fields if f is not None]
        if not self.fields:
            raise ValueError("Composite field needs at least one component.")
        xs = np.unique(np.concatenate([f.knots[0] for f in self.fields]))
        ys = np.sum([f(xs) for f in self.fields], axis=0)
        self._knots = (xs, ys)

    @property
    def knots(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._knots

    def antiderivative(self, x) -> np.ndarray:
        return np.sum([f.antiderivative(x) for f in self.fields], axis=0)

    def scaled(self, c: float) -> "CompositeField":
        return CompositeField([f.scaled(c) for f in self.fields])

    def toDict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "fields": [f.toDict() for f in self.fields]}


def field_from_dict(fieldDict: Dict[str, Any], domain: Domain) -> TestField:
    """Inverse of ``toDict`` for all test field kinds."""
    kind = fieldDict.get("kind")
    if kind == TrapezoidBump.kind:
        return TrapezoidBump(
            fieldDict["center"], fieldDict["plateau"], fieldDict["support"], fieldDict["height"]
        )
    if kind == NodalField.kind:
        return NodalField(domain, fieldDict["values"])
    if kind == CompositeField.kind:
        return CompositeField([field_from_dict(f, domain) for f in fieldDict["fields"]])
    raise ValueError(f"Unknown test field kind {kind}.")
