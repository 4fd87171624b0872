"""Exception hierarchy shared across the package.

CLI exit codes hang off these classes: ingest/IO problems exit 1, backend
problems exit 2.
"""

from __future__ import annotations


class EcolinkError(Exception):
    """Base class for all package errors."""


class IngestError(EcolinkError):
    """Malformed or unreadable input data."""


class IndexIntegrityError(EcolinkError):
    """Index file is corrupt or was not written by this package."""


class UnknownActivityError(EcolinkError):
    """Referenced activity id does not exist in the loaded database."""


class EvalError(EcolinkError):
    """Evaluation cannot proceed (e.g. no gold labels)."""


class BackendError(EcolinkError):
    """Embedding or chat backend failure.

    ``retryable`` marks transport-level failures that a caller may retry;
    ``status`` carries the HTTP status when one was received.
    """

    def __init__(self, message: str, *, retryable: bool = False, status: int | None = None):
        super().__init__(message)
        self.retryable = retryable
        self.status = status


class FixtureMissError(BackendError):
    """Canned chat backend has no response for the requested prompt."""
