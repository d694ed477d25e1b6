"""Coefficient fields p(x) and a(x) of Φ-functions."""

import dataclasses
import enum
import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np

from phibv.data_model.domain import Domain
from phibv.errors import DomainError, ShapeError

log = logging.getLogger("phibv")


class FieldKind(str, enum.Enum):
    """Coefficient field descriptors of the Φ-spec."""

    CONST = "const"
    GRID = "grid"
    LOG_TYPE = "log_type"
    POWER_TYPE = "power_type"
    INTERVAL = "interval"

    def __str__(self):
        """Return string representation of FieldKind."""
        return self.value


@dataclasses.dataclass(frozen=True, eq=False)
class CoefficientField:
    """Scalar field on a 1D or 2D domain.

    Points are scalars in 1D and arrays with a trailing axis of length 2 in 2D.
    ``log_type`` is ``1 + c_log / log(1/d)`` for ``d < cutoff`` and constant
    beyond, ``power_type`` is ``1 + scale * d**alpha``, where ``d`` is the
    distance to the nearest centre ``x0``. Both equal 1 exactly at the centres.
    """

    kind: FieldKind
    params: Dict[str, Any] = dataclasses.field(default_factory=dict)
    values: Optional[np.ndarray] = None
    domain: Optional[Domain] = None
    dimension: int = 1

    @classmethod
    def const(cls, value: float, dimension: int = 1) -> "CoefficientField":
        """Create constant field."""
        return cls(FieldKind.CONST, {"value": float(value)}, dimension=dimension)

    @classmethod
    def grid(cls, domain: Domain, values) -> "CoefficientField":
        """Create field from samples at the cell centres of ``domain``."""
        values = np.array(values, dtype=float)
        if values.shape != domain.shape:
            log.error(f"Grid field shape {values.shape} does not match {domain.shape}")
            raise ShapeError(
                f"Grid field has shape {values.shape}, domain expects {domain.shape}."
            )
        values.setflags(write=False)
        return cls(FieldKind.GRID, {}, values, domain, domain.dimension)

    @classmethod
    def logType(
        cls, c_log: float, x0=0.0, cutoff: float = 0.5, dimension: int = 1
    ) -> "CoefficientField":
        """Create logarithmic exponent field ``1 + c_log/log(1/|x - x0|)``."""
        if not 0 < cutoff < 1:
            raise ValueError(f"log_type cutoff must lie in (0, 1), got {cutoff}")
        if c_log < 0:
            raise ValueError(f"log_type c_log must be non negative, got {c_log}")
        return cls(
            FieldKind.LOG_TYPE,
            {"c_log": float(c_log), "x0": _centres(x0, dimension), "cutoff": float(cutoff)},
            dimension=dimension,
        )

    @classmethod
    def powerType(
        cls, alpha: float, x0=0.0, scale: float = 1.0, dimension: int = 1
    ) -> "CoefficientField":
        """Create power exponent field ``1 + scale*|x - x0|**alpha``."""
        if alpha <= 0 or scale < 0:
            raise ValueError(f"power_type needs alpha > 0 and scale >= 0, got {alpha}, {scale}")
        return cls(
            FieldKind.POWER_TYPE,
            {"alpha": float(alpha), "x0": _centres(x0, dimension), "scale": float(scale)},
            dimension=dimension,
        )

    @classmethod
    def interval(
        cls,
        lo: float,
        hi: float,
        inside: float,
        outside: float,
        axis: int = -1,
        dimension: int = 1,
    ) -> "CoefficientField":
        """Create field equal to ``inside`` on ``[lo, hi]`` and ``outside`` elsewhere.

        In 2D the interval applies to coordinate ``axis`` (default: x).
        """
        return cls(
            FieldKind.INTERVAL,
            {
                "lo": float(lo),
                "hi": float(hi),
                "inside": float(inside),
                "outside": float(outside),
                "axis": int(axis),
            },
            dimension=dimension,
        )

    @property
    def isConstant(self) -> bool:
        """Whether the field does not depend on x."""
        if self.kind == FieldKind.CONST:
            return True
        if self.kind == FieldKind.GRID:
            return bool(np.all(self.values == self.values.flat[0]))  # type: ignore
        if self.kind == FieldKind.INTERVAL:
            return self.params["inside"] == self.params["outside"]
        return False

    @property
    def singularPoints(self) -> np.ndarray:
        """Centres where the field loses smoothness, 1D positions only."""
        if self.dimension == 1 and self.kind in (FieldKind.LOG_TYPE, FieldKind.POWER_TYPE):
            return np.atleast_1d(self.params["x0"]).astype(float)
        return np.empty(0)

    def _pointShape(self, x: np.ndarray) -> Tuple[int, ...]:
        return x.shape if self.dimension == 1 else x.shape[:-1]

    def distance(self, x) -> np.ndarray:
        """Distance of points to the nearest centre."""
        x = np.asarray(x, dtype=float)
        centres = np.asarray(self.params["x0"], dtype=float)
        if self.dimension == 1:
            centres = np.atleast_1d(centres)
            return np.min(np.abs(x[..., None] - centres), axis=-1)
        centres = np.atleast_2d(centres)
        diff = x[..., None, :] - centres
        return np.min(np.sqrt(np.sum(diff * diff, axis=-1)), axis=-1)

    def __call__(self, x) -> np.ndarray:
        """Evaluate field at points ``x``."""
        x = np.asarray(x, dtype=float)
        if self.kind == FieldKind.CONST:
            return np.full(self._pointShape(x), self.params["value"])
        if self.kind == FieldKind.GRID:
            return self._evalGrid(x)
        if self.kind == FieldKind.INTERVAL:
            coordinate = x if self.dimension == 1 else x[..., self.params["axis"]]
            inside = (coordinate >= self.params["lo"]) & (coordinate <= self.params["hi"])
            return np.where(inside, self.params["inside"], self.params["outside"])
        d = self.distance(x)
        if self.kind == FieldKind.POWER_TYPE:
            return 1.0 + self.params["scale"] * d ** self.params["alpha"]
        d = np.minimum(d, self.params["cutoff"])
        with np.errstate(divide="ignore"):
            logInv = -np.log(d)
        # d == 0 gives log(1/d) = inf and p = 1 exactly
        return 1.0 + self.params["c_log"] / logInv

    def _evalGrid(self, x: np.ndarray) -> np.ndarray:
        domain: Domain = self.domain  # type: ignore
        values: np.ndarray = self.values  # type: ignore
        if domain.dimension == 1:
            return np.interp(x, domain.centers, values)
        index = []
        for axis in range(2):
            lo, _ = domain.extent[axis]
            k = np.floor((x[..., axis] - lo) / domain.spacing[axis]).astype(int)
            index.append(np.clip(k, 0, domain.shape[axis] - 1))
        return values[index[0], index[1]]

    def sampleRange(self, domain: Domain) -> Tuple[float, float]:
        """Minimum and maximum over cell centres, nodes and singular centres."""
        samples = [np.ravel(self(domain.centers))]
        if domain.dimension == 1:
            samples.append(self(domain.nodes))
            sing = self.singularPoints
            if sing.size:
                samples.append(self(sing[domain.contains(sing)]))
        allSamples = np.concatenate(samples)
        return float(np.min(allSamples)), float(np.max(allSamples))

    def toDict(self) -> Dict[str, Any]:
        """Serialize to the Φ-spec descriptor."""
        if self.kind == FieldKind.GRID:
            return {"kind": self.kind.value, "values": self.values.tolist()}  # type: ignore
        out: Dict[str, Any] = {"kind": self.kind.value}
        for key, value in self.params.items():
            out[key] = value.tolist() if isinstance(value, np.ndarray) else value
        return out

    @classmethod
    def fromDict(
        cls, fieldDict: Dict[str, Any], domain: Optional[Domain] = None
    ) -> "CoefficientField":
        """Create field from a Φ-spec descriptor.

        Raises
        ------
        ValueError
            Unknown kind or missing parameters.
        """
        try:
            kind = FieldKind(fieldDict["kind"])
        except (KeyError, ValueError, TypeError):
            log.error(f"Invalid field descriptor {fieldDict}")
            raise ValueError(f"Invalid field kind in {fieldDict}.")

        dimension = domain.dimension if domain is not None else 1
        try:
            if kind == FieldKind.CONST:
                return cls.const(fieldDict["value"], dimension)
            if kind == FieldKind.GRID:
                if domain is None:
                    raise DomainError("Grid fields need a domain.")
                return cls.grid(domain, fieldDict["values"])
            if kind == FieldKind.LOG_TYPE:
                return cls.logType(
                    fieldDict["c_log"],
                    fieldDict.get("x0", 0.0),
                    fieldDict.get("cutoff", 0.5),
                    dimension,
                )
            if kind == FieldKind.POWER_TYPE:
                return cls.powerType(
                    fieldDict["alpha"],
                    fieldDict.get("x0", 0.0),
                    fieldDict.get("scale", 1.0),
                    dimension,
                )
            return cls.interval(
                fieldDict["lo"],
                fieldDict["hi"],
                fieldDict["inside"],
                fieldDict["outside"],
                fieldDict.get("axis", -1),
                dimension,
            )
        except KeyError as e:
            log.error(f"Missing parameter {e} in field descriptor {fieldDict}")
            raise ValueError(f"Missing parameter {e} in {kind.value} field.")


def _centres(x0, dimension: int):
    centres = np.asarray(x0, dtype=float)
    if dimension == 1:
        return float(centres) if centres.ndim == 0 else centres
    return centres
