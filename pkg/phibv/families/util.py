"""Φ-spec loading."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Type

from phibv import PHI_SPEC_SCHEMA
from phibv.data_model.domain import Domain
from phibv.data_model.fields import CoefficientField
from phibv.errors import DataFormatError
from phibv.families.autonomous import Autonomous, TabulatedConvex
from phibv.families.base import Growth, PhiFunction
from phibv.families.clr import CLR
from phibv.families.double_phase import DoublePhase
from phibv.families.linear import Linear
from phibv.families.power import NormalizedVarExp, PowerVarExp

log = logging.getLogger("phibv")

familyList: Dict[str, Type[PhiFunction]] = {
    cls.id: cls
    for cls in [
        Linear,
        PowerVarExp,
        NormalizedVarExp,
        CLR,
        DoublePhase,
        Autonomous,
        TabulatedConvex,
    ]
}


def loadPhi(phiDict: Dict[str, Any], domain: Optional[Domain] = None) -> PhiFunction:
    """Build a Φ-function from its Φ-spec dictionary.

    Parameters
    ----------
    phiDict : Dict[str, Any]
        Φ-spec, see :meth:`PhiFunction.toDict`.
    domain : Optional[Domain]
        Domain used when the Φ-spec carries none.

    Returns
    -------
    PhiFunction
        Φ-function bound to the domain, if any.

    Raises
    ------
    ValueError
        Unknown family, unsupported schema or invalid coefficients.
    """
    schema = phiDict.get("schema", PHI_SPEC_SCHEMA)
    if schema != PHI_SPEC_SCHEMA:
        log.error(f"Unsupported Φ-spec schema {schema}")
        raise ValueError(f"Unsupported Φ-spec schema {schema}, expected {PHI_SPEC_SCHEMA}.")

    familyId = phiDict.get("family")
    if familyId not in familyList:
        log.error(f"Unknown Φ-function family {familyId}")
        raise ValueError(
            f"Unknown family {familyId}. Available: {', '.join(familyList.keys())}."
        )

    if "domain" in phiDict:
        domain = Domain.fromDict(phiDict["domain"])
    growth = Growth.fromDict(phiDict["growth"]) if phiDict.get("growth") else None
    family = familyList[familyId]
    log.debug(f"Loading {family.name} Φ-function")

    def field(name: str) -> CoefficientField:
        if name not in phiDict:
            raise ValueError(f"Family {familyId} needs a '{name}' field descriptor.")
        return CoefficientField.fromDict(phiDict[name], domain)

    if family is Linear:
        return Linear(domain, growth)
    if family in (PowerVarExp, NormalizedVarExp, CLR):
        return family(field("p"), domain, growth)  # type: ignore
    if family is DoublePhase:
        return DoublePhase(field("a"), domain, growth)
    if family is Autonomous:
        return Autonomous(
            phiDict.get("coef", 1.0),
            phiDict.get("exponent", 2.0),
            domain,
            growth,
        )
    try:
        return TabulatedConvex(phiDict["t"], phiDict["phi"], domain, growth)
    except KeyError as e:
        raise ValueError(f"Tabulated profile needs {e} samples.")


def phiFromFile(path: Path, domain: Optional[Domain] = None) -> PhiFunction:
    """Read a Φ-spec JSON file.

    Raises
    ------
    DataFormatError
        File unreadable, not JSON or not a valid Φ-spec.
    """
    try:
        phiDict = json.loads(Path(path).read_text())
    except OSError as e:
        log.error(f"Could not read {path}: {e}")
        raise DataFormatError(str(path), f"cannot read file ({e.strerror})")
    except json.JSONDecodeError as e:
        log.error(f"Invalid JSON in {path}")
        raise DataFormatError(str(path), f"invalid JSON ({e.msg})", line=e.lineno)
    if not isinstance(phiDict, dict):
        raise DataFormatError(str(path), "Φ-spec must be a JSON object")
    try:
        return loadPhi(phiDict, domain)
    except ValueError as e:
        raise DataFormatError(str(path), str(e))
