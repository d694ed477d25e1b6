"""Configuration module."""

import configparser
import logging
import os
from pathlib import Path
from typing import Any, Callable, Mapping

log = logging.getLogger("phibv")

_default_config: Mapping[str, Mapping[str, Any]] = {
    "numerics": {
        "tol": 1e-8,  # exact-arithmetic identities
        "limit_tol": 1e-3,  # relative, limit-based quantities
        "legendre_points": 2048,
        "legendre_tmin": 1e-6,
        "legendre_tmax": 1e6,
        "recession_kmin": 10,
        "recession_kmax": 40,
        "growth_cap": 100.0,
        "quad_order": 8,
        "quad_floor": 1e-40,
        "threads": 0,  # 0: physical cores
    },
    "duality": {
        "family": "both",
        "resolution": 0,  # 0: grid of u
        "delta_min": 1e-30,
        "delta_max": 0.3,
        "m_min": 0.1,
        "m_max": 100.0,
        "m_points": 25,
        "delta_points": 20,
        "refine_iters": 100,
        "iters": 4,
        "seed": 0,
        "smoothing": 0.0,
        "est_slack": 0.1,
        "bisect_iters": 60,
        "equivalence_iters": 30,
    },
    "solver": {
        "max_iter": 100000,
        "energy_tol": 1e-9,
        "window": 50,
        "eps_scale": 1e-6,
        "jump_factor": 5.0,
        "jump_floor": 0.05,
        "rof_tol": 1e-10,
        "rof_max_iter": 200000,
    },
    "domain": {
        "extent_lo": 0.0,
        "extent_hi": 1.0,
        "n": 256,
    },
    "debug": {"log_lvl": "WARNING"},
}

config: configparser.ConfigParser = configparser.ConfigParser(allow_no_value=True)
config.read_dict(_default_config)

globalConfigPath = Path.home() / ".config/phibv.ini"
if globalConfigPath.exists() and globalConfigPath.is_file():
    config.read(globalConfigPath)

localConfigPath = Path.cwd() / ".phibv.ini"
if localConfigPath.exists() and localConfigPath.is_file():
    config.read(localConfigPath)


def read_custom_config(
    pathStr: str,
) -> None:
    """Read INI config file and save in global configuration objects.

    Parameters
    ----------
    pathStr : str
        Path to configuration file.
    """
    configPath: Path = Path(pathStr)
    if configPath.exists() and configPath.is_file():
        config.read(configPath)


def save_to_config(key: str, value: Any):
    """Save key and value to configuration.

    Parameters
    ----------
    key : str
        Option name
    value : Any
        Option value
    """
    for section in config.sections():
        if config.has_option(section, key):
            config.set(section, key, str(value))


def read_environ():
    """Read phibv environmental variables (``PHIBV_<OPTION>``)."""
    for section, subconf in _default_config.items():
        for option in subconf.keys():
            envvar = f"PHIBV_{option.upper()}"
            if envvar in os.environ:
                config.set(section, option, os.environ[envvar])


def _sanitize_number(
    config: configparser.ConfigParser,
    section: str,
    option: str,
    valid: Callable[[float], bool],
    requirement: str,
    integer: bool = False,
):
    default = str(_default_config[section][option])
    try:
        value = (
            config.getint(section, option)
            if integer
            else config.getfloat(section, option)
        )
        if not valid(value):
            log.warning(
                f"Invalid {option} {value}. Should be {requirement}. Defaulting to {default}."
            )
            config.set(section, option, default)
    except ValueError:
        log.warning(
            f"Invalid {option}. Should be {requirement}. Defaulting to {default}."
        )
        config.set(section, option, default)


def sanitize_config(config) -> configparser.ConfigParser:
    """Sanitize configuration values.

    Parameters
    ----------
    config : configparser.ConfigParser
        Configuration object.

    Returns
    -------
    configparser.ConfigParser
        Sanitized configuration object.
    """
    positive = (lambda v: v > 0, "a number higher than 0")
    atLeastOne = (lambda v: v >= 1, "an integer higher or equal than 1")

    for option in ["tol", "limit_tol", "legendre_tmin", "legendre_tmax", "quad_floor"]:
        _sanitize_number(config, "numerics", option, *positive)
    for option in ["legendre_points", "recession_kmax", "quad_order"]:
        _sanitize_number(config, "numerics", option, *atLeastOne, integer=True)
    _sanitize_number(
        config,
        "numerics",
        "growth_cap",
        lambda v: v >= 1,
        "a number higher or equal than 1",
    )
    _sanitize_number(
        config,
        "numerics",
        "threads",
        lambda v: v >= 0,
        "a non negative integer",
        integer=True,
    )
    if config.getfloat("numerics", "legendre_tmin") >= config.getfloat(
        "numerics", "legendre_tmax"
    ):
        log.warning("Legendre grid is empty. Defaulting to [1e-6, 1e6].")
        config.set("numerics", "legendre_tmin", "1e-06")
        config.set("numerics", "legendre_tmax", "1000000.0")

    # Dual search strategy
    family = config.get("duality", "family")
    if family not in ["nodal", "bump", "both"]:
        log.warning(f"Invalid search family {family}. Defaulting to both.")
        config.set("duality", "family", "both")
    for option in ["delta_min", "m_min", "m_max", "est_slack"]:
        _sanitize_number(config, "duality", option, *positive)
    _sanitize_number(
        config,
        "duality",
        "delta_max",
        lambda v: 0 < v <= 0.5,
        "a number in (0, 0.5]",
    )
    for option in [
        "m_points",
        "delta_points",
        "refine_iters",
        "iters",
        "bisect_iters",
        "equivalence_iters",
    ]:
        _sanitize_number(config, "duality", option, *atLeastOne, integer=True)
    for option in ["resolution", "seed"]:
        _sanitize_number(
            config,
            "duality",
            option,
            lambda v: v >= 0,
            "a non negative integer",
            integer=True,
        )
    _sanitize_number(
        config,
        "duality",
        "smoothing",
        lambda v: v >= 0,
        "a non negative number",
    )

    # Solver
    for option in ["energy_tol", "eps_scale", "jump_factor", "rof_tol"]:
        _sanitize_number(config, "solver", option, *positive)
    for option in ["max_iter", "window", "rof_max_iter"]:
        _sanitize_number(config, "solver", option, *atLeastOne, integer=True)
    _sanitize_number(
        config,
        "solver",
        "jump_floor",
        lambda v: 0 <= v < 1,
        "a number in [0, 1)",
    )

    # Default domain
    _sanitize_number(
        config,
        "domain",
        "n",
        lambda v: v >= 2,
        "an integer higher or equal than 2",
        integer=True,
    )
    try:
        lo = config.getfloat("domain", "extent_lo")
        hi = config.getfloat("domain", "extent_hi")
        if not lo < hi:
            raise ValueError
    except ValueError:
        log.warning("Invalid domain extent. Defaulting to (0, 1).")
        config.set("domain", "extent_lo", "0.0")
        config.set("domain", "extent_hi", "1.0")

    # Ensure that the log_lvl is valid
    log_lvl = config.get("debug", "log_lvl")
    if log_lvl not in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
        log.warning(f"Invalid log level {log_lvl}. Defaulting to WARNING.")
        config.set("debug", "log_lvl", "WARNING")

    return config


def config_to_dict(config: configparser.ConfigParser) -> dict:
    """Return the effective configuration as a nested dictionary of strings.

    Parameters
    ----------
    config : configparser.ConfigParser
        Configuration object.

    Returns
    -------
    dict
        ``{section: {option: value}}``, used as provenance in reports.
    """
    return {
        section: dict(config.items(section, raw=True)) for section in config.sections()
    }
