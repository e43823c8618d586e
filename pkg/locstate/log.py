"""
    Logging for locstate

"""

import logging
import os

import coloredlogs  # type: ignore

from locstate.constants import LOGLEVEL_ENV

FIELD_STYLES = dict(
    levelname=dict(color="green"),
)


def setup_logger(name):
    """Create logger and configure it with colours, honouring LOCSTATE_LOGLEVEL."""

    logger = logging.getLogger(name)
    coloredlogs.install(
        level=os.environ.get(LOGLEVEL_ENV, "INFO").upper(),
        fmt="%(levelname)s - %(message)s",
        logger=logger,
        field_styles=FIELD_STYLES,
    )
    return logger


LOGGER = setup_logger("locstate")
