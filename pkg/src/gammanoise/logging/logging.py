# -*- coding: utf-8 -*-
"""
System logging utilities for gammanoise runs.
"""

import logging
from typing import Any, Dict, Optional

from .context import RunContext

_logger = logging.getLogger(__name__)

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
_HANDLER_NAME = "gammanoise-stream"


def configure_logging(level: str = "INFO", fmt: str = DEFAULT_FORMAT) -> logging.Logger:
    """
    Install a single stream handler on the package logger. Calling this
    twice replaces the handler instead of stacking a second one.
    """
    root = logging.getLogger("gammanoise")
    numeric = logging.getLevelName(str(level).upper())
    if not isinstance(numeric, int):
        raise ValueError(f"unknown log level: {level!r}")
    for handler in list(root.handlers):
        if handler.get_name() == _HANDLER_NAME:
            root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.set_name(_HANDLER_NAME)
    handler.setFormatter(logging.Formatter(fmt))
    root.addHandler(handler)
    root.setLevel(numeric)
    root.propagate = False
    return root


def log_startup(context: RunContext, config: Optional[Dict[str, Any]] = None) -> str:
    """Log the start of a command."""
    _logger.info(
        "[%s] startup: command=%s seed=%d out_dir=%s",
        context.run_id, context.command, context.seed, context.out_dir,
    )
    if config:
        _logger.debug("[%s] config: %s", context.run_id, config)
    return 'startup logged'


def log_error(context: RunContext, error: BaseException, error_type: str = "error") -> str:
    """Log an error that ends a command."""
    _logger.error(
        "[%s] %s in %s: %s: %s",
        context.run_id, error_type, context.command, type(error).__name__, error,
    )
    return 'error logged'


def log_shutdown(context: RunContext, passed: bool, n_checks: int = 0) -> str:
    """Log the end of a command with its overall verdict."""
    level = logging.INFO if passed else logging.WARNING
    _logger.log(
        level, "[%s] shutdown: command=%s checks=%d passed=%s",
        context.run_id, context.command, n_checks, passed,
    )
    return 'shutdown logged'
