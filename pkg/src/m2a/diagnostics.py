"""Structured diagnostics shared by every stage of the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    """Byte-offset range in a source file plus the 1-based line/column of its start."""

    start: int
    end: int
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    rule: str
    message: str
    span: Span | None = None
    file: str | None = None

    def located(self, file: str | None) -> Diagnostic:
        if self.file is not None or file is None:
            return self
        return Diagnostic(self.severity, self.rule, self.message, self.span, file)

    def format(self) -> str:
        where = self.file or "<input>"
        if self.span is not None:
            where = f"{where}:{self.span.line}:{self.span.col}"
        return f"{where}: {self.severity}[{self.rule}]: {self.message}"

    def to_dict(self) -> dict:
        d = {"severity": self.severity, "rule": self.rule, "message": self.message, "file": self.file}
        if self.span is not None:
            d.update(line=self.span.line, col=self.span.col, start=self.span.start, end=self.span.end)
        return d


def error(rule: str, message: str, span: Span | None = None) -> Diagnostic:
    return Diagnostic("error", rule, message, span)


def warning(rule: str, message: str, span: Span | None = None) -> Diagnostic:
    return Diagnostic("warning", rule, message, span)


@dataclass
class M2AError(Exception):
    """Raised when a stage cannot continue; carries one or more error diagnostics."""

    diagnostics: list[Diagnostic] = field(default_factory=list)

    def __post_init__(self):
        super().__init__("; ".join(d.format() for d in self.diagnostics))

    @classmethod
    def single(cls, rule: str, message: str, span: Span | None = None) -> M2AError:
        return cls([error(rule, message, span)])

    @property
    def rules(self) -> list[str]:
        return [d.rule for d in self.diagnostics]
