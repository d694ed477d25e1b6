import os
import tempfile
from unittest import mock

import pytest

from phibv.configuration import (
    _default_config,
    config,
    config_to_dict,
    read_custom_config,
    read_environ,
    sanitize_config,
    save_to_config,
)


# Helper function to reset the config to default before each test
def reset_config():
    config.clear()
    config.read_dict(_default_config)


@pytest.fixture(autouse=True)
def run_around_tests():
    reset_config()
    yield
    reset_config()


def test_read_custom_config():
    with tempfile.NamedTemporaryFile(delete=False) as tmpfile:
        tmpfile.write(b"[numerics]\ntol = 1e-6\n")
        tmpfile_path = tmpfile.name

    read_custom_config(tmpfile_path)
    assert config.getfloat("numerics", "tol") == 1e-6

    os.remove(tmpfile_path)


def test_save_to_config():
    save_to_config("seed", 7)
    assert config.getint("duality", "seed") == 7


def test_read_environ():
    with mock.patch.dict(os.environ, {"PHIBV_THREADS": "3"}):
        read_environ()
        assert config.getint("numerics", "threads") == 3


def test_sanitize_config():
    config.set("numerics", "tol", "-1")
    config.set("numerics", "legendre_points", "0")
    config.set("numerics", "growth_cap", "0.5")
    config.set("numerics", "threads", "-2")
    config.set("duality", "family", "spline")
    config.set("duality", "delta_max", "0.9")
    config.set("duality", "m_points", "0")
    config.set("duality", "seed", "-1")
    config.set("solver", "jump_floor", "1.5")
    config.set("solver", "window", "zero")
    config.set("domain", "n", "1")
    config.set("domain", "extent_lo", "2.0")
    config.set("debug", "log_lvl", "INVALID")

    sanitized_config = sanitize_config(config)

    assert sanitized_config.getfloat("numerics", "tol") == 1e-8
    assert sanitized_config.getint("numerics", "legendre_points") == 2048
    assert sanitized_config.getfloat("numerics", "growth_cap") == 100.0
    assert sanitized_config.getint("numerics", "threads") == 0
    assert sanitized_config.get("duality", "family") == "both"
    assert sanitized_config.getfloat("duality", "delta_max") == 0.3
    assert sanitized_config.getint("duality", "m_points") == 25
    assert sanitized_config.getint("duality", "seed") == 0
    assert sanitized_config.getfloat("solver", "jump_floor") == 0.05
    assert sanitized_config.getint("solver", "window") == 50
    assert sanitized_config.getint("domain", "n") == 256
    assert sanitized_config.getfloat("domain", "extent_lo") == 0.0
    assert sanitized_config.getfloat("domain", "extent_hi") == 1.0
    assert sanitized_config.get("debug", "log_lvl") == "WARNING"


def test_sanitize_config_valid_values():
    config.set("numerics", "tol", "1e-6")
    config.set("numerics", "threads", "4")
    config.set("duality", "family", "nodal")
    config.set("duality", "delta_max", "0.5")
    config.set("duality", "seed", "12")
    config.set("solver", "jump_floor", "0")
    config.set("domain", "extent_lo", "-1")
    config.set("debug", "log_lvl", "DEBUG")

    sanitized_config = sanitize_config(config)

    assert sanitized_config.getfloat("numerics", "tol") == 1e-6
    assert sanitized_config.getint("numerics", "threads") == 4
    assert sanitized_config.get("duality", "family") == "nodal"
    assert sanitized_config.getfloat("duality", "delta_max") == 0.5
    assert sanitized_config.getint("duality", "seed") == 12
    assert sanitized_config.getfloat("solver", "jump_floor") == 0.0
    assert sanitized_config.getfloat("domain", "extent_lo") == -1.0
    assert sanitized_config.get("debug", "log_lvl") == "DEBUG"


def test_sanitize_config_empty_legendre_grid():
    config.set("numerics", "legendre_tmin", "10")
    config.set("numerics", "legendre_tmax", "1")
    sanitized_config = sanitize_config(config)
    assert sanitized_config.getfloat("numerics", "legendre_tmin") == 1e-6
    assert sanitized_config.getfloat("numerics", "legendre_tmax") == 1e6


def test_read_custom_config_invalid_path():
    invalid_path = "/invalid/path/to/config.ini"
    read_custom_config(invalid_path)
    # Ensure that the default config is still intact
    assert config.getfloat("numerics", "tol") == 1e-8


def test_save_to_config_nonexistent_key():
    save_to_config("nonexistent_key", "value")
    # Ensure that the nonexistent key is not added to the config
    assert not config.has_option("numerics", "nonexistent_key")


def test_read_environ_invalid_value():
    with mock.patch.dict(os.environ, {"PHIBV_TOL": "invalid"}):
        read_environ()
        sanitize_config(config)
        # Ensure that the invalid value is not set
        assert config.getfloat("numerics", "tol") == 1e-8


def test_config_to_dict():
    configDict = config_to_dict(config)
    assert set(configDict.keys()) == set(_default_config.keys())
    assert configDict["duality"]["seed"] == "0"
    assert "output" not in configDict
    assert configDict["debug"]["log_lvl"] == "WARNING"
