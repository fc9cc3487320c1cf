# -*- coding: utf-8 -*-
"""
Run configuration for gammanoise.
"""

from .settings import (
    OUT_DIR_ENV,
    RunConfig,
    ThetaSpec,
    load_config,
    apply_overrides,
    resolve_out_dir,
)

__all__ = [
    'OUT_DIR_ENV',
    'RunConfig',
    'ThetaSpec',
    'load_config',
    'apply_overrides',
    'resolve_out_dir',
]
