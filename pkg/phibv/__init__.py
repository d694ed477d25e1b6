"""phibv module."""

# flake8: noqa
__version__ = "0.3.0"
PHI_SPEC_SCHEMA = 1

from phibv.configuration import config
from phibv.logging import init_logging

log = init_logging(config.get("debug", "log_lvl"))
