# -*- coding: utf-8 -*-
"""
Exception hierarchy and the process exit codes the CLI maps them to.
"""
from typing import Optional

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3


class PtlabError(Exception):
    """Base class for every error raised by ptlab."""


class DomainError(PtlabError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NumericalError(PtlabError):
    """A numerical routine failed to converge or to meet its accuracy contract."""


class ConfigError(PtlabError):
    """A run configuration is malformed or violates a model invariant."""

    def __init__(self, message: str, field: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.field = field
        self.line = line
        self.column = column
        location = []
        if line is not None:
            location.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        if field:
            location.append(f"field '{field}'")
        prefix = f"{'; '.join(location)}: " if location else ""
        super().__init__(prefix + message)
