"""Exception hierarchy shared across the toolkit.

ConfigError maps to CLI exit code 2, DataError (and subclasses) to exit
code 3.
"""

from __future__ import annotations


class ForgeError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ForgeError):
    """Invalid configuration: bad threshold, unknown key, missing file."""


class DataError(ForgeError):
    """Invalid or inconsistent input data."""


class CorpusError(DataError):
    """Malformed corpus input (bad JSONL line, duplicate ids, ...)."""


class StageError(DataError):
    """A pipeline stage failed on a specific document."""

    def __init__(self, stage: str, message: str, doc_id: str | None = None):
        self.stage = stage
        self.doc_id = doc_id
        where = f"stage {stage!r}" + (f", document {doc_id!r}" if doc_id else "")
        super().__init__(f"{where}: {message}")
