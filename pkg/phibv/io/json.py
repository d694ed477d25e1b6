"""IO Json module."""

import json
import logging
from configparser import ConfigParser
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from phibv.data_model.report import encode_value
from phibv.errors import DataFormatError

log = logging.getLogger("phibv")

REQUIRED_KEYS: Dict[str, set] = {
    "conjugate": {"x", "s", "values"},
    "modular": {"ac_part", "singular_part", "total", "atoms"},
    "dualsup": {"value", "optimizer", "cap_reached"},
    "dualnorm": {"value", "optimizer"},
    "denoise": {"p", "energy", "iterations", "cap_reached"},
    "gamma-sweep": {"schedule", "energies", "gap", "limit_modular", "jump_atoms", "flags"},
    "check-conditions": {"conditions"},
    "approx": {"deltas", "values", "target"},
}


class NumpyEncoder(json.JSONEncoder):
    """Json Numpy object encoder."""

    def default(self, obj):
        """Encode obj to json or to a supported format.

        :param obj: Object to encode.
        :type obj: _type_
        :return: Encoded obj.
        :rtype: _type_
        """
        if isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.floating):
            return encode_value(float(obj))
        elif isinstance(obj, np.ndarray):
            return encode_value(obj)
        elif isinstance(obj, np.bool_):
            return bool(obj)
        else:
            return super(NumpyEncoder, self).default(obj)


def emit_report(
    kind: str,
    body: Dict[str, Any],
    path: Optional[Path] = None,
    conf: Optional[ConfigParser] = None,
) -> str:
    """Serialize a report with version, schema and the effective configuration.

    Keys are sorted and ±∞ written as ``"inf"``/``"-inf"``, so equal inputs give
    byte-identical files.

    Raises
    ------
    ValueError
        Unknown report kind or missing required keys.
    """
    from phibv import PHI_SPEC_SCHEMA, __version__
    from phibv.configuration import config, config_to_dict

    if kind not in REQUIRED_KEYS:
        log.error(f"Unknown report kind {kind}")
        raise ValueError(f"Unknown report kind '{kind}'.")
    missing = REQUIRED_KEYS[kind] - set(body)
    if missing:
        log.error(f"Report {kind} misses {sorted(missing)}")
        raise ValueError(f"Report '{kind}' misses keys {sorted(missing)}.")

    report = dict(body)
    report.update(
        {
            "kind": kind,
            "version": __version__,
            "schema": PHI_SPEC_SCHEMA,
            "config": config_to_dict(conf if conf is not None else config),
        }
    )
    reportStr = json.dumps(
        encode_value(report), cls=NumpyEncoder, sort_keys=True, indent=2, allow_nan=False
    )
    if path is not None:
        path = Path(path)
        if path.exists() and path.is_file():
            log.info(f"Overwriting existing file {path}")
        with open(path, "w", encoding="utf-8") as file:
            file.write(reportStr + "\n")
    return reportStr


def read_json(path: Path) -> Dict[str, Any]:
    """Load a JSON object, reporting the line of syntax errors.

    Raises
    ------
    DataFormatError
        Missing file, invalid JSON or a non-object top level.
    """
    try:
        with open(path, "r", encoding="utf-8") as file:
            data = json.load(file)
    except OSError as e:
        log.error(f"Cannot read {path}: {e}")
        raise DataFormatError(str(path), str(e)) from e
    except json.JSONDecodeError as e:
        log.error(f"Invalid JSON in {path}: {e.msg}")
        raise DataFormatError(str(path), e.msg, line=e.lineno) from e
    if not isinstance(data, dict):
        raise DataFormatError(str(path), "expected a JSON object", line=1)
    return data
