# -*- coding: utf-8 -*-
"""
Result writers (CSV and JSON).
"""

from .files import (
    to_json_text,
    write_csv,
    write_json,
)

__all__ = [
    "to_json_text",
    "write_csv",
    "write_json",
]
