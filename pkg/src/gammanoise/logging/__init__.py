# -*- coding: utf-8 -*-
"""
Logging utilities for gammanoise runs.
"""

# Context management
from .context import (
    RunContext,
    set_run_context,
    get_run_context,
    get_out_dir,
)

# System logging functions
from .logging import (
    DEFAULT_FORMAT,
    configure_logging,
    log_error,
    log_startup,
    log_shutdown,
)

# Check ledger functions
from .check_history import (
    record_check,
    record_result,
    failed_checks,
    summary,
    reset_history,
)

__all__ = [
    # Context management
    'RunContext',
    'set_run_context',
    'get_run_context',
    'get_out_dir',

    # System logs
    'DEFAULT_FORMAT',
    'configure_logging',
    'log_error',
    'log_startup',
    'log_shutdown',

    # Check ledger
    'record_check',
    'record_result',
    'failed_checks',
    'summary',
    'reset_history',
]
