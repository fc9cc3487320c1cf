# -*- coding: utf-8 -*-
"""
Run context management for gammanoise logging.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)
_RUN_CONTEXT: Dict[str, Any] = {}


@dataclass
class RunContext:
    """Identity of one CLI run, attached to every log line and check record."""
    command: str
    seed: int
    out_dir: str
    run_id: str = ""

    def __post_init__(self):
        logger.debug("Run context created for %s (run %s, seed %d)", self.command, self.run_id, self.seed)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def set_run_context(context: RunContext):
    """
    Set the global run context.
    """
    global _RUN_CONTEXT
    _RUN_CONTEXT = context.to_dict()


def get_run_context() -> Dict[str, Any]:
    """
    Get the global run context.
    """
    return _RUN_CONTEXT


def get_out_dir() -> Optional[str]:
    """
    Get the output directory of the current run.
    """
    return _RUN_CONTEXT.get("out_dir")
