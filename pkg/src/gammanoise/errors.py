# -*- coding: utf-8 -*-
"""
Exception hierarchy for gammanoise.

Library code raises these; only the command-line front end turns them into
failure records and exit codes.
"""

from typing import Any, Dict, List, Optional


class GammaNoiseError(Exception):
    """Base class for every error raised by gammanoise."""
    pass


class DomainError(GammaNoiseError, ValueError):
    """Argument outside the domain of a function."""
    pass


class BranchError(DomainError):
    """Complex logarithm evaluated on its branch cut."""

    def __init__(self, cell: int, value: complex):
        self.cell = cell
        self.value = value
        super().__init__(
            f"1 - i*lambda lies on the branch cut of log in cell {cell} (value {value!r})"
        )


class PartitionMismatchError(GammaNoiseError):
    """Operands live on different partitions or truncations."""
    pass


class SingularElementError(GammaNoiseError):
    """Wick inverse requested for an element with zero constant term."""

    def __init__(self, message: str = "", time: Optional[float] = None):
        self.time = time
        text = message or "element has zero expectation"
        text += "; the Wick inverse needs <<Y, 1>> != 0"
        if time is not None:
            text += f" (at t={time!r})"
        super().__init__(text)


class TruncationLossError(GammaNoiseError):
    """Truncation-loss ledger exceeded the configured bound."""

    def __init__(self, loss: float, bound: float, time: Optional[float] = None):
        self.loss = loss
        self.bound = bound
        self.time = time
        where = f" at t={time!r}" if time is not None else ""
        super().__init__(f"truncation loss {loss:.3e} exceeds bound {bound:.3e}{where}")


class ConfigurationError(GammaNoiseError):
    """Configuration error."""
    pass


class ToleranceFailure(GammaNoiseError):
    """One or more validation checks failed."""

    def __init__(self, records: List[Dict[str, Any]]):
        self.records = records
        names = ", ".join(r.get("name", "?") for r in records)
        super().__init__(f"{len(records)} check(s) failed: {names}")
