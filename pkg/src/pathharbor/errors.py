"""Error types shared across services.

Every platform error carries a stable machine-readable ``code`` so HTTP layers
and CLIs can map failures uniformly.
"""

from __future__ import annotations


class PlatformError(Exception):
    """Base class for all platform errors."""

    code = "PLATFORM_ERROR"
    http_status = 400

    def __init__(self, message: str = "", *, code: str | None = None):
        super().__init__(message or self.__class__.code)
        if code is not None:
            self.code = code

    @property
    def message(self) -> str:
        return str(self)


class NotFoundError(PlatformError):
    code = "NOT_FOUND"
    http_status = 404


class WrongStateError(PlatformError):
    code = "WRONG_STATE"
    http_status = 409


class UnauthorizedError(PlatformError):
    code = "UNAUTHORIZED"
    http_status = 403


class ValidationFailure(PlatformError):
    """Raised when a document or payload fails semantic validation.

    Carries the individual violations so callers can surface them.
    """

    code = "VALIDATION_FAILED"

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])
