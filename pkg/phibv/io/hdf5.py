"""HDF5 IO module: export of Γ-sweeps."""

import json
import logging
from pathlib import Path
from typing import Any, Dict

import h5py
import numpy as np

from phibv.data_model.domain import Domain
from phibv.errors import DataFormatError
from phibv.solver import SweepResult

log = logging.getLogger("phibv")


def exportSweep(filePath: Path, result: SweepResult, domain: Domain):
    """Write a sweep: schedule, energies, minimizers, limit candidate and atoms.

    Parameters
    ----------
    filePath : Path
        Output path
    result : SweepResult
        Sweep to store.
    domain : Domain
        Grid of the minimizers.
    """
    with h5py.File(filePath, "w") as h5_file:
        group = h5_file.create_group("sweep")
        group.attrs["domain"] = json.dumps(domain.toDict())
        group.attrs["threshold"] = result.threshold
        group.attrs["gap"] = result.gap
        group.attrs["relative_gap"] = result.relativeGap
        group.attrs["flags"] = json.dumps(result.flags)
        group.attrs["limit_modular"] = json.dumps(result.limitModular.toDict())
        group.create_dataset("schedule", data=np.asarray(result.schedule))
        group.create_dataset("energies", data=np.asarray(result.energies))
        group.create_dataset("iterations", data=np.asarray(result.iterations))
        group.create_dataset("lower_bounds", data=np.asarray(result.lowerBounds))
        group.create_dataset("minimizers", data=np.stack(result.minimizers))
        limit = group.create_group("limit")
        limit.create_dataset("values", data=result.limit.values)
        limit.create_dataset("gradient", data=result.limit.gradient)
        limit.create_dataset("atom_jumps", data=result.limit.atomJumps)
        limit.create_dataset(
            "atom_positions", data=np.asarray(result.limit.atomPositions, dtype=float)
        )


def importSweep(filePath: Path) -> Dict[str, Any]:
    """Read a sweep file back into plain arrays for inspection.

    Raises
    ------
    DataFormatError
        File without a sweep group.
    """
    try:
        h5_file = h5py.File(filePath, "r")
    except OSError as e:
        log.error(f"Cannot open {filePath}: {e}")
        raise DataFormatError(str(filePath), str(e)) from e
    with h5_file:
        if "sweep" not in h5_file or not isinstance(h5_file["sweep"], h5py.Group):
            raise DataFormatError(str(filePath), "no sweep group in file")
        group = h5_file["sweep"]
        out: Dict[str, Any] = {
            "domain": Domain.fromDict(json.loads(group.attrs["domain"])),
            "threshold": float(group.attrs["threshold"]),
            "gap": float(group.attrs["gap"]),
            "relative_gap": float(group.attrs["relative_gap"]),
            "flags": json.loads(group.attrs["flags"]),
            "limit_modular": json.loads(group.attrs["limit_modular"]),
        }
        for key in ["schedule", "energies", "iterations", "lower_bounds", "minimizers"]:
            out[key] = group[key][()]
        out["limit"] = {key: value[()] for key, value in group["limit"].items()}
    return out
