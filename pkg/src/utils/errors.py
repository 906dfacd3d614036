"""
Error types
Every failure the CLI can report maps to one of these classes, and each class
carries the process exit code used by main.py.
"""

from typing import Optional


class QCNNError(Exception):
    """Base class for all project errors."""

    exit_code = 1


class ConfigurationError(QCNNError, ValueError):
    """Invalid configuration: qubit counts, architecture or run settings."""

    exit_code = 3


class OracleScaleError(ConfigurationError):
    """Dense unitary requested beyond the oracle size limit."""


class InvalidInputError(QCNNError, ValueError):
    """Invalid state, gate, vector, shape or dataset."""

    exit_code = 2


class DegenerateInputError(InvalidInputError):
    """Input that cannot be normalized (all-zero image)."""


class FormatError(QCNNError, ValueError):
    """Malformed IDX container."""

    exit_code = 2

    def __init__(self, message: str, path: Optional[str] = None, offset: Optional[int] = None):
        self.path = path
        self.offset = offset
        location = ""
        if path is not None:
            location = f" [{path}"
            if offset is not None:
                location += f" @ byte {offset}"
            location += "]"
        super().__init__(f"{message}{location}")


class DigestMismatchError(QCNNError):
    """Checkpoint does not belong to the requested architecture or classes."""

    exit_code = 3


class VerificationError(QCNNError):
    """Gradient check exceeded its tolerance."""

    exit_code = 4
