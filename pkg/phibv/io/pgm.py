"""PGM images through Pillow."""

import logging
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from phibv.errors import DataFormatError

log = logging.getLogger("phibv")

_MODE_SCALE = {"L": 255.0, "I": 65535.0, "I;16": 65535.0, "I;16B": 65535.0}


def load_pgm(path: Path) -> np.ndarray:
    """Load a P2 or P5 PGM as intensities in [0, 1], shape ``(ny, nx)``.

    Pillow scales samples by the file's maxval to the full range of its mode.

    Raises
    ------
    DataFormatError
        Not a grayscale PGM, or truncated pixel data.
    """
    path = Path(path)
    try:
        with Image.open(path) as image:
            if image.format != "PPM" or image.mode not in _MODE_SCALE:
                raise DataFormatError(
                    str(path), f"expected a grayscale PGM, got {image.format} in mode {image.mode}", byte=0
                )
            mode = image.mode
            pixels = np.asarray(image, dtype=float)
    except FileNotFoundError as e:
        log.error(f"Missing input file {path}")
        raise DataFormatError(str(path), "file not found") from e
    except UnidentifiedImageError as e:
        log.error(f"Unreadable image {path}")
        raise DataFormatError(str(path), "not a PGM image", byte=0) from e
    except (OSError, ValueError) as e:
        if isinstance(e, DataFormatError):
            raise
        log.error(f"Corrupt image {path}: {e}")
        raise DataFormatError(str(path), str(e), byte=path.stat().st_size) from e
    return pixels / _MODE_SCALE[mode]


def save_pgm(path: Path, intensities):
    """Write intensities in [0, 1] as an 8-bit P5 PGM."""
    intensities = np.asarray(intensities, dtype=float)
    if intensities.ndim != 2:
        raise DataFormatError(str(path), f"images need 2D samples, got shape {intensities.shape}")
    if np.any(intensities < 0) or np.any(intensities > 1):
        log.warning("Clipping intensities outside [0, 1]")
    pixels = np.rint(np.clip(intensities, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(pixels).save(path, format="PPM")
