"""Run configuration and logging setup for tropml."""
from __future__ import annotations

import logging
import types
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import colorlog
import voluptuous as vol
import yaml

from .const import (
    CONF_BURNIN,
    CONF_HEADER,
    CONF_LOG_LEVEL,
    CONF_OUTPUT,
    CONF_PARALLEL,
    CONF_SEED,
    CONF_TOL,
    DEFAULT_BURNIN,
    DEFAULT_HEADER,
    DEFAULT_LOG_LEVEL,
    DEFAULT_OUTPUT,
    DEFAULT_PARALLEL,
    DEFAULT_SEED,
    DEFAULT_TOL,
    DOMAIN,
    LOGGER,
)
from .exceptions import InputError

LOG_LEVELS = ["debug", "info", "warning", "error", "critical"]

RUN_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): vol.All(int, vol.Range(min=0)),
        vol.Optional(CONF_TOL, default=DEFAULT_TOL): vol.All(
            vol.Coerce(float), vol.Range(min=0)
        ),
        vol.Optional(CONF_HEADER, default=DEFAULT_HEADER): bool,
        vol.Optional(CONF_OUTPUT, default=DEFAULT_OUTPUT): vol.Any(None, str),
        vol.Optional(CONF_PARALLEL, default=DEFAULT_PARALLEL): vol.All(
            int, vol.Range(min=1)
        ),
        vol.Optional(CONF_BURNIN, default=DEFAULT_BURNIN): vol.All(
            vol.Coerce(float), vol.Range(min=0, max=1, max_included=False)
        ),
        vol.Optional(CONF_LOG_LEVEL, default=DEFAULT_LOG_LEVEL): vol.All(
            vol.Lower, vol.In(LOG_LEVELS)
        ),
    }
)

LOGGER_SCHEMA = vol.Schema(
    {
        vol.Optional("default", default=DEFAULT_LOG_LEVEL): vol.All(
            vol.Lower, vol.In(LOG_LEVELS)
        ),
        vol.Optional("logs", default={}): {str: vol.All(vol.Lower, vol.In(LOG_LEVELS))},
    }
)

DEFAULT_OPTIONS = types.MappingProxyType(
    {
        CONF_SEED: DEFAULT_SEED,
        CONF_TOL: DEFAULT_TOL,
        CONF_HEADER: DEFAULT_HEADER,
        CONF_OUTPUT: DEFAULT_OUTPUT,
        CONF_PARALLEL: DEFAULT_PARALLEL,
        CONF_BURNIN: DEFAULT_BURNIN,
        CONF_LOG_LEVEL: DEFAULT_LOG_LEVEL,
    }
)

LOG_FORMAT = "%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s"


@dataclass(frozen=True)
class RunConfig:
    """Validated options of one CLI invocation."""

    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL
    header: bool = DEFAULT_HEADER
    output: str | None = DEFAULT_OUTPUT
    parallel: int = DEFAULT_PARALLEL
    burnin: float = DEFAULT_BURNIN
    log_level: str = DEFAULT_LOG_LEVEL


def load_configuration(path: str | Path | None, required: bool = False) -> dict[str, Any]:
    """Read a YAML configuration file.

    Args:
        path: The file to read.
        required: Raise when the file is missing instead of returning {}.

    Returns:
        The parsed document, {} when there is nothing to read.

    """
    if path is None:
        return {}
    file = Path(path)
    if not file.is_file():
        if required:
            raise InputError(f"configuration file {file} not found")
        return {}
    try:
        document = yaml.safe_load(file.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as err:
        raise InputError(f"invalid configuration file {file}: {err}") from err
    if not isinstance(document, dict):
        raise InputError(f"configuration file {file} is not a mapping")
    LOGGER.debug("Loaded configuration from %s", file)
    return document


def build_run_config(
    file_options: dict[str, Any] | None = None, overrides: dict[str, Any] | None = None
) -> RunConfig:
    """Merge defaults, the file's tropml section and command-line overrides."""
    options = dict(DEFAULT_OPTIONS)
    options.update((file_options or {}).get(DOMAIN) or {})
    options.update({key: value for key, value in (overrides or {}).items() if value is not None})
    try:
        validated = RUN_CONFIG_SCHEMA(options)
    except vol.Invalid as err:
        raise InputError(f"invalid option: {err}") from err
    return RunConfig(**validated)


def setup_logging(level: str | None, logger_section: dict[str, Any] | None = None) -> None:
    """Install a coloured stderr handler and apply per-logger levels."""
    try:
        section = LOGGER_SCHEMA(logger_section or {})
    except vol.Invalid as err:
        raise InputError(f"invalid logger section: {err}") from err
    root = logging.getLogger()
    for existing in [h for h in root.handlers if h.get_name() == DOMAIN]:
        root.removeHandler(existing)
    handler = colorlog.StreamHandler()
    handler.set_name(DOMAIN)
    handler.setFormatter(colorlog.ColoredFormatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(section["default"].upper())
    for name, name_level in section["logs"].items():
        logging.getLogger(name).setLevel(name_level.upper())
    if level:
        LOGGER.setLevel(level.upper())
