"""Pandas IO module: signal and atom CSV files."""

import logging
from pathlib import Path
from typing import Any, List, Sequence, Tuple

import numpy as np
import pandas as pd

from phibv.data_model.bv import Atom
from phibv.data_model.domain import Domain
from phibv.errors import DataFormatError, DomainError

log = logging.getLogger("phibv")

_FLOAT_FORMAT = "%.17g"


def _readNumeric(path: Path, columns: Sequence[str]) -> pd.DataFrame:
    """Read a headerless or headed numeric CSV with the given column count.

    Raises
    ------
    DataFormatError
        Unreadable file, wrong column count or non numeric entry; the message
        names the offending line.
    """
    try:
        frame = pd.read_csv(path, header=None, comment="#", skipinitialspace=True, dtype=str)
    except FileNotFoundError as e:
        log.error(f"Missing input file {path}")
        raise DataFormatError(str(path), "file not found") from e
    except pd.errors.EmptyDataError as e:
        log.error(f"Empty input file {path}")
        raise DataFormatError(str(path), "file is empty", line=1) from e
    except pd.errors.ParserError as e:
        log.error(f"Malformed CSV {path}: {e}")
        raise DataFormatError(str(path), str(e)) from e

    if frame.shape[1] != len(columns):
        raise DataFormatError(
            str(path), f"expected {len(columns)} columns ({', '.join(columns)}), got {frame.shape[1]}", line=1
        )
    firstLine = 1
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    if numeric.iloc[0].isna().all():
        # header row
        frame = frame.iloc[1:]
        numeric = numeric.iloc[1:]
        firstLine = 2
    bad = numeric.isna().any(axis=1).to_numpy()
    if bad.any():
        row = int(np.argmax(bad))
        log.error(f"Non numeric entry in {path}")
        raise DataFormatError(
            str(path), f"non numeric entry {frame.iloc[row].tolist()}", line=firstLine + row
        )
    numeric.columns = list(columns)
    return numeric.reset_index(drop=True)


def load_signal(path: Path) -> Tuple[np.ndarray, Domain]:
    """Load a ``x,value`` CSV of samples at equispaced cell centres.

    Returns
    -------
    Tuple[np.ndarray, Domain]
        Samples and the 1D domain whose centres are the x column.
    """
    frame = _readNumeric(Path(path), ["x", "value"])
    try:
        domain = Domain.fromCenters(frame["x"].to_numpy())
    except DomainError as e:
        raise DataFormatError(str(path), str(e)) from e
    return frame["value"].to_numpy(dtype=float), domain


def save_signal(path: Path, samples, domain: Domain):
    """Write samples with their cell centres as headerless ``x,value`` CSV."""
    frame = pd.DataFrame({"x": domain.centers, "value": np.asarray(samples, dtype=float)})
    frame.to_csv(path, header=False, index=False, float_format=_FLOAT_FORMAT)


def load_atoms(path: Path, domain: Domain) -> List[Any]:
    """Load atom descriptions, ``x,jump`` in 1D and ``axis,i,j,jump`` in 2D."""
    if domain.dimension == 1:
        frame = _readNumeric(Path(path), ["x", "jump"])
        return [(float(x), float(s)) for x, s in zip(frame["x"], frame["jump"])]
    frame = _readNumeric(Path(path), ["axis", "i", "j", "jump"])
    return [
        (int(a), int(i), int(j), float(s))
        for a, i, j, s in zip(frame["axis"], frame["i"], frame["j"], frame["jump"])
    ]


def save_atoms(path: Path, atoms: Sequence[Atom], domain: Domain):
    """Write atoms in the layout read by :func:`load_atoms`."""
    if domain.dimension == 1:
        frame = pd.DataFrame(
            {"x": [a.position for a in atoms], "jump": [a.jump for a in atoms]},
            columns=["x", "jump"],
        )
    else:
        frame = pd.DataFrame(
            [(a.key[0], a.key[1], a.key[2], a.jump) for a in atoms],
            columns=["axis", "i", "j", "jump"],
        )
    frame.to_csv(path, header=False, index=False, float_format=_FLOAT_FORMAT)
