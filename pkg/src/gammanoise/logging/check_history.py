# -*- coding: utf-8 -*-
"""
Check ledger: the pass/fail record of every tolerance tested during a run.
"""

import logging
import math
from typing import Any, Dict, List, Optional

from .context import RunContext

logger = logging.getLogger(__name__)

_CHECKS: List[Dict[str, Any]] = []
_RESULTS: Dict[str, Any] = {}


def _number(value: Any) -> Any:
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def record_check(
    context: RunContext,
    name: str,
    value: Any,
    reference: Any,
    tolerance: float,
    passed: bool,
    detail: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Append one check to the ledger and log it."""
    record = {
        "name": name,
        "command": context.command,
        "value": _number(value),
        "reference": _number(reference),
        "tolerance": tolerance,
        "passed": bool(passed),
        "detail": detail or {},
    }
    _CHECKS.append(record)
    if passed:
        logger.info("[%s] check %s passed (value=%s, tolerance=%s)", context.run_id, name, value, tolerance)
    else:
        logger.warning("[%s] check %s FAILED (value=%s, reference=%s, tolerance=%s)",
                       context.run_id, name, value, reference, tolerance)
    return record


def record_result(context: RunContext, name: str, value: Any) -> str:
    """Store a named result value that is reported but not tested."""
    _RESULTS[name] = _number(value)
    logger.info("[%s] result %s = %s", context.run_id, name, value)
    return 'result recorded'


def failed_checks() -> List[Dict[str, Any]]:
    return [c for c in _CHECKS if not c["passed"]]


def summary() -> Dict[str, Any]:
    """Ledger as a JSON-ready dict."""
    return {
        "checks": list(_CHECKS),
        "results": dict(_RESULTS),
        "passed": not failed_checks(),
    }


def reset_history():
    _CHECKS.clear()
    _RESULTS.clear()
