"""IO Module."""

import enum
import logging
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from phibv.data_model.domain import Domain
from phibv.errors import DataFormatError

log = logging.getLogger("phibv")

_suffixes = {
    "json": "json",
    "csv": "csv",
    "pgm": "pgm",
    "hdf5": "hdf5",
}


class IOFormat(enum.Enum):
    """Available IO file formats."""

    JSON = "json"
    CSV = "csv"
    PGM = "pgm"
    HDF5 = "hdf5"

    @property
    def suffix(self):
        """Return file suffix from format."""
        return _suffixes[self.value]

    @classmethod
    def fromSuffix(cls, suffix: str):
        """Return format from suffix, with or without the leading dot."""
        suffix = suffix.lower().lstrip(".")
        if suffix in ("h5", "hdf"):
            return cls.HDF5
        for key, value in _suffixes.items():
            if value == suffix:
                return cls(key)
        raise ValueError(f"Invalid file format '{suffix}'.")


def formatOf(path: Path) -> IOFormat:
    """Format of a data file from its suffix.

    Raises
    ------
    DataFormatError
        Unknown suffix.
    """
    try:
        return IOFormat.fromSuffix(Path(path).suffix)
    except ValueError as e:
        log.error(f"Unknown data file suffix of {path}")
        raise DataFormatError(str(path), str(e)) from e


def loadSamples(
    path: Path, extent: Optional[Tuple[Tuple[float, float], ...]] = None
) -> Tuple[np.ndarray, Domain]:
    """Load grid samples from a signal CSV or a PGM image.

    Images cover ``extent`` when given and the unit square otherwise.
    """
    path = Path(path)
    format = formatOf(path)
    if format == IOFormat.CSV:
        from phibv.io.pandas import load_signal

        return load_signal(path)
    if format == IOFormat.PGM:
        from phibv.io.pgm import load_pgm

        image = load_pgm(path)
        (ylo, yhi), (xlo, xhi) = extent if extent else ((0.0, 1.0), (0.0, 1.0))
        return image, Domain.rectangle((ylo, yhi), (xlo, xhi), *image.shape)
    raise DataFormatError(str(path), f"{format.value} files carry no grid samples.")


def saveSamples(path: Path, samples: np.ndarray, domain: Domain):
    """Write grid samples in the format given by the suffix of ``path``."""
    path = Path(path)
    format = formatOf(path)
    if path.exists() and path.is_file():
        log.info(f"Overwriting existing file {path}")
    if format == IOFormat.CSV:
        from phibv.io.pandas import save_signal

        save_signal(path, samples, domain)
    elif format == IOFormat.PGM:
        from phibv.io.pgm import save_pgm

        save_pgm(path, samples)
    else:
        raise DataFormatError(str(path), f"Cannot store grid samples as {format.value}.")
