# SPDX-FileCopyrightText: 2024-present kulnor <pascal.heus@gmail.com>
#
# SPDX-License-Identifier: MIT
"""Exception hierarchy shared by every module of the toolkit.

Two families matter to callers: :class:`InputError` for bad user input (the CLI exits with
code 2) and :class:`InvariantViolation` for a mathematically guaranteed property that failed
to hold (a bug, the CLI exits with code 1).
"""

from typing import Any


class LengthVolumeError(Exception):
    """Base exception for the toolkit."""

    def __init__(self, message: str, operation: str | None = None, details: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.operation = operation
        self.details = details or {}

    def __str__(self) -> str:
        base_message = f"{self.message}"
        if self.operation is not None:
            base_message += f"; Operation: {self.operation}"
        if self.details:
            rendered = ", ".join(f"{key}={value}" for key, value in self.details.items())
            base_message += f"; Details: {rendered}"
        return base_message


class InputError(LengthVolumeError):
    """Malformed or inadmissible input."""


class MetricAxiomError(InputError):
    """A user supplied distance matrix is not a (pseudo)metric."""


class ParameterError(InputError):
    """A parameter is outside its admissible range, or an instance is too large for exact search."""


class InvariantViolation(LengthVolumeError):
    """A property that holds by theorem failed on a concrete instance.

    The ``witness`` carries the offending data so that the failure can be replayed.
    """

    def __init__(
        self,
        message: str,
        operation: str | None = None,
        witness: Any = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message, operation, details)
        self.witness = witness

    def __str__(self) -> str:
        base_message = super().__str__()
        if self.witness is not None:
            base_message += f"; Witness: {self.witness}"
        return base_message
