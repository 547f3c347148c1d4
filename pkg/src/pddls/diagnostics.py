from __future__ import annotations

from dataclasses import dataclass

ERROR = "ERROR"
WARNING = "WARNING"
INFO = "INFO"


@dataclass(frozen=True, order=True)
class Diagnostic:
    """A non-fatal finding. Rendered as ``LEVEL<TAB>CODE<TAB>message``."""

    level: str
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.level}\t{self.code}\t{self.message}"


def format_diagnostics(diags) -> str:
    return "".join(f"{d}\n" for d in diags)


def has_errors(diags) -> bool:
    return any(d.level == ERROR for d in diags)
