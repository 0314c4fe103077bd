"""Exception types raised across the package."""

from __future__ import annotations


class QxtalkError(Exception):
    """Base class for all package errors."""


class CircuitError(QxtalkError):
    """Invalid circuit construction (bad qubit index, duplicate qubit, ...)."""


class QasmError(QxtalkError):
    """Text parse or emit failure, with source position when available."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, col {column}: {message}"
        super().__init__(message)


class ScheduleError(QxtalkError):
    """Scheduling failure, e.g. a gate with no duration entry."""


class TopologyError(QxtalkError):
    """Invalid coupling map, layout, or unknown preset."""


class WindowError(QxtalkError):
    """Attack/placebo window shorter than the requested trail."""


class CompositionError(QxtalkError):
    """Qubit collision while composing victim and attacker fragments."""


class EngineError(QxtalkError):
    """Simulation failure (qubit cap exceeded, NaN amplitude, bad inputs)."""


class ConfigError(QxtalkError):
    """Malformed experiment or noise configuration."""


class HarnessError(QxtalkError):
    """Sweep-cell failure; message identifies the failing (n_cnot, batch)."""
