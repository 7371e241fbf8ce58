# This module defines the exceptions raised across the laboratory
# Every error is a ValueError so callers can keep catching the familiar type
from typing import Any, Optional


class DipeError(ValueError):
    code = "DIPE_ERROR"

    def __init__(self, message: str, details: Optional[Any] = None):
        super().__init__(message)
        self.message = message
        self.details = details


# This is raised when a configured dimension or qubit cap would be exceeded
class SizeError(DipeError):
    code = "SIZE_LIMIT"


# This is raised for bad indices, parameters, family strings or supports
class ArgumentError(DipeError):
    code = "INVALID_ARGUMENT"


# This is raised by verification drivers asked to fail hard
class VerificationError(DipeError):
    code = "VERIFICATION_FAILED"
