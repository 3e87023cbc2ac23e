"""Exception types and diagnostics shared across the framework."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    """A single problem report; line/col are 1-based, 0 when not tied to text."""

    code: str
    message: str
    line: int = 0
    col: int = 0

    def render(self) -> str:
        if self.line:
            return f"{self.line}:{self.col}: {self.code}: {self.message}"
        return f"{self.code}: {self.message}"

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message, "line": self.line, "col": self.col}


class KayaError(Exception):
    """Base class for all framework errors."""


class ParseError(KayaError):
    """Source text rejected by a parser; carries positioned diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.render() for d in self.diagnostics))


class UnsupportedTypeError(KayaError):
    pass


class TypeMismatchError(KayaError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class DepthMismatchError(KayaError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class UnknownAddressError(KayaError):
    def __init__(self, slot: int):
        self.slot = slot
        super().__init__(f"storage slot {slot:#x} was never derived or assigned")


class ValueOverflowError(KayaError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class UnknownTokenError(KayaError):
    pass


class ArityMismatchError(KayaError):
    pass


class ValidationFailed(KayaError):
    """A suite failed validation; the runner refuses to execute it."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.render() for d in self.diagnostics))
