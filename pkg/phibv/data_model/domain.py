"""Rectangular grid domains."""

import dataclasses
import logging
from typing import Dict, Tuple

import numpy as np

from phibv.errors import DomainError

log = logging.getLogger("phibv")


@dataclasses.dataclass(frozen=True)
class Domain:
    """Bounded interval or rectangle split into equal cells.

    Axes follow array order: a 2D domain has ``shape = (ny, nx)`` and points are
    ``(y, x)``. Samples live at cell centres. In 1D the ``n + 1`` cell edges are
    the grid nodes, and atoms may sit on the ``n - 1`` interior ones.
    """

    extent: Tuple[Tuple[float, float], ...]
    shape: Tuple[int, ...]

    def __post_init__(self):
        """Validate extent and cell counts."""
        if len(self.extent) != len(self.shape) or len(self.shape) not in (1, 2):
            log.error(f"Invalid domain dimension: {self.extent}, {self.shape}")
            raise DomainError("Domain must be 1D or 2D with one extent per axis.")
        for (lo, hi), n in zip(self.extent, self.shape):
            if not np.isfinite(lo) or not np.isfinite(hi) or not lo < hi:
                log.error(f"Invalid domain extent ({lo}, {hi})")
                raise DomainError(f"Invalid domain extent ({lo}, {hi}).")
            if int(n) != n or n < 2:
                log.error(f"Invalid cell count {n}")
                raise DomainError(f"Domains need at least 2 cells per axis, got {n}.")

    @classmethod
    def interval(cls, lo: float, hi: float, n: int) -> "Domain":
        """Create 1D domain."""
        return cls(((float(lo), float(hi)),), (int(n),))

    @classmethod
    def rectangle(
        cls, extentY: Tuple[float, float], extentX: Tuple[float, float], ny: int, nx: int
    ) -> "Domain":
        """Create 2D domain."""
        return cls(
            ((float(extentY[0]), float(extentY[1])), (float(extentX[0]), float(extentX[1]))),
            (int(ny), int(nx)),
        )

    @classmethod
    def fromCenters(cls, x: np.ndarray, rtol: float = 1e-6) -> "Domain":
        """Recover a 1D domain from equispaced cell centres.

        Raises
        ------
        DomainError
            If the samples are not equispaced and increasing.
        """
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise DomainError("Need at least two sample positions.")
        steps = np.diff(x)
        h = float(np.mean(steps))
        if h <= 0 or np.max(np.abs(steps - h)) > rtol * abs(h):
            raise DomainError("Sample positions must be increasing and equispaced.")
        return cls.interval(x[0] - h / 2, x[-1] + h / 2, x.size)

    @property
    def dimension(self) -> int:
        """Spatial dimension."""
        return len(self.shape)

    @property
    def n(self) -> int:
        """Total number of cells."""
        return int(np.prod(self.shape))

    @property
    def spacing(self) -> Tuple[float, ...]:
        """Cell width per axis."""
        return tuple((hi - lo) / n for (lo, hi), n in zip(self.extent, self.shape))

    @property
    def h(self) -> float:
        """Smallest cell width."""
        return min(self.spacing)

    @property
    def cellMeasure(self) -> float:
        """Length or area of one cell."""
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        """Measure of the domain."""
        return float(np.prod([hi - lo for lo, hi in self.extent]))

    def axisCenters(self, axis: int = 0) -> np.ndarray:
        """Cell centres along one axis."""
        (lo, _), n, h = self.extent[axis], self.shape[axis], self.spacing[axis]
        return lo + (np.arange(n) + 0.5) * h

    def axisNodes(self, axis: int = 0) -> np.ndarray:
        """Cell edges along one axis, boundary included."""
        (lo, _), n, h = self.extent[axis], self.shape[axis], self.spacing[axis]
        return lo + np.arange(n + 1) * h

    @property
    def centers(self) -> np.ndarray:
        """Cell centres, shape ``(n,)`` in 1D and ``(ny, nx, 2)`` in 2D."""
        if self.dimension == 1:
            return self.axisCenters(0)
        yy, xx = np.meshgrid(self.axisCenters(0), self.axisCenters(1), indexing="ij")
        return np.stack([yy, xx], axis=-1)

    @property
    def nodes(self) -> np.ndarray:
        """1D grid nodes (cell edges)."""
        return self.axisNodes(0)

    def contains(self, x) -> np.ndarray:
        """Whether points lie in the closed extent."""
        x = np.asarray(x, dtype=float)
        if self.dimension == 1:
            lo, hi = self.extent[0]
            return (x >= lo) & (x <= hi)
        inside = np.ones(x.shape[:-1], dtype=bool)
        for axis, (lo, hi) in enumerate(self.extent):
            inside &= (x[..., axis] >= lo) & (x[..., axis] <= hi)
        return inside

    def checkContains(self, x):
        """Raise :class:`DomainError` unless all points lie in the extent."""
        if not np.all(self.contains(x)):
            log.error(f"Point {x} outside of domain {self.extent}")
            raise DomainError(f"Point {x} outside of domain {self.extent}.")

    def snapNode(self, x: float, axis: int = 0, rtol: float = 1e-9) -> int:
        """Return the index of the interior node at ``x``.

        Raises
        ------
        DomainError
            If ``x`` is not an interior node up to ``rtol`` cells.
        """
        lo, _ = self.extent[axis]
        h = self.spacing[axis]
        position = (float(x) - lo) / h
        k = int(round(position))
        if abs(position - k) > rtol * max(1.0, abs(position)) + rtol:
            log.error(f"Atom at {x} is not on a grid node")
            raise DomainError(
                f"Atom at {x} is not on a grid node; sub-grid atom placement is rejected."
            )
        if k < 1 or k > self.shape[axis] - 1:
            log.error(f"Atom at {x} is not inside the domain")
            raise DomainError(f"Atom at {x} must lie strictly inside the domain.")
        return k

    def toDict(self) -> Dict:
        """Serialize domain."""
        return {"extent": [list(e) for e in self.extent], "shape": list(self.shape)}

    @classmethod
    def fromDict(cls, domainDict: Dict) -> "Domain":
        """Build domain from dictionary.

        Accepts ``{"extent": [lo, hi], "n": n}`` for intervals and the output of
        :meth:`toDict`.
        """
        extent = domainDict["extent"]
        if "shape" in domainDict:
            return cls(tuple(tuple(map(float, e)) for e in extent), tuple(domainDict["shape"]))
        return cls.interval(extent[0], extent[1], domainDict["n"])
