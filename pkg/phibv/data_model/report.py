"""Result records of checks, modular evaluations, dual searches and sweeps."""

import dataclasses
import enum
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from phibv.data_model.extreal import ExtReal


def encode_value(value: Any) -> Any:
    """Make floats JSON safe, ±∞ become ``"inf"`` and ``"-inf"``."""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [encode_value(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): encode_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode_value(v) for v in value]
    return value


def decode_value(value: Any) -> Any:
    """Inverse of :func:`encode_value` for scalars."""
    if value == "inf":
        return math.inf
    if value == "-inf":
        return -math.inf
    return value


class Verdict(str, enum.Enum):
    """Outcome of a condition check."""

    HOLDS = "holds"
    FAILS = "fails"
    VANISHING = "vanishing"
    NOT_VANISHING = "not vanishing"
    VACUOUS = "vacuous"
    INADMISSIBLE = "inadmissible"

    def __str__(self):
        """Return string representation of Verdict."""
        return self.value


@dataclasses.dataclass
class ConditionReport:
    """Verdict of a condition estimator with its witness.

    ``constant`` is the measured constant (β, L or a modulus) and ``table`` the
    modulus ω(r) on dyadic radii, finest radius last.
    """

    condition: str
    holds: bool
    verdict: Verdict
    constant: Optional[float] = None
    witness: Dict[str, Any] = dataclasses.field(default_factory=dict)
    table: List[Tuple[float, float]] = dataclasses.field(default_factory=list)
    resolution: Dict[str, Any] = dataclasses.field(default_factory=dict)

    def toDict(self) -> Dict[str, Any]:
        """Serialize report."""
        return encode_value(
            {
                "condition": self.condition,
                "holds": self.holds,
                "verdict": self.verdict.value,
                "constant": self.constant,
                "witness": self.witness,
                "table": [list(row) for row in self.table],
                "resolution": self.resolution,
            }
        )

    @classmethod
    def fromDict(cls, reportDict: Dict[str, Any]) -> "ConditionReport":
        """Create report from dictionary."""
        return cls(
            reportDict["condition"],
            bool(reportDict["holds"]),
            Verdict(reportDict["verdict"]),
            decode_value(reportDict.get("constant")),
            reportDict.get("witness", {}),
            [(decode_value(r), decode_value(w)) for r, w in reportDict.get("table", [])],
            reportDict.get("resolution", {}),
        )


@dataclasses.dataclass
class AtomWeight:
    """Contribution of one atom to the singular part."""

    x: Any
    jump: float
    weight: ExtReal

    def toDict(self) -> Dict[str, Any]:
        """Serialize atom line."""
        return encode_value({"x": self.x, "jump": self.jump, "weight": float(self.weight)})


@dataclasses.dataclass
class ModularReport:
    """Itemized modular: AC part, singular part, optional fidelity, total.

    ``warnings`` names conditions under which the closed form was not verified.
    """

    ac_part: ExtReal
    singular_part: ExtReal
    total: ExtReal
    fidelity: Optional[float] = None
    atoms: List[AtomWeight] = dataclasses.field(default_factory=list)
    warnings: List[str] = dataclasses.field(default_factory=list)

    def toDict(self) -> Dict[str, Any]:
        """Serialize report, ∞ as ``"inf"``."""
        return encode_value(
            {
                "ac_part": float(self.ac_part),
                "singular_part": float(self.singular_part),
                "fidelity": self.fidelity,
                "total": float(self.total),
                "atoms": [atom.toDict() for atom in self.atoms],
                "warnings": list(self.warnings),
            }
        )

    @classmethod
    def fromDict(cls, reportDict: Dict[str, Any]) -> "ModularReport":
        """Create report from its JSON form."""
        fidelity = reportDict.get("fidelity")
        return cls(
            ExtReal(reportDict["ac_part"]),
            ExtReal(reportDict["singular_part"]),
            ExtReal(reportDict["total"]),
            None if fidelity is None else float(fidelity),
            [
                AtomWeight(a["x"], float(a["jump"]), ExtReal(a["weight"]))
                for a in reportDict.get("atoms", [])
            ],
            list(reportDict.get("warnings", [])),
        )


class SpaceClass(str, enum.Enum):
    """Function space BV^φ coincides with, for autonomous φ."""

    CLASSICAL_BV = "ClassicalBV"
    SOBOLEV_W1PHI = "SobolevW1Phi"

    def __str__(self):
        """Return string representation of SpaceClass."""
        return self.value
