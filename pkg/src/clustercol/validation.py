from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Validation:
    """Outcome of a structural check. Violations are data, not exceptions.

    Each violation is a ``(kind, detail)`` pair, e.g. ``("edge", (3, 7))``.
    """

    violations: list[tuple[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, detail: Any) -> None:
        self.violations.append((kind, detail))

    def extend(self, other: "Validation", prefix: str = "") -> None:
        for kind, detail in other.violations:
            self.violations.append((prefix + kind, detail))

    def __bool__(self) -> bool:
        return self.ok

    def summary(self, limit: int = 5) -> str:
        if self.ok:
            return "ok"
        shown = "; ".join(f"{k}: {d}" for k, d in self.violations[:limit])
        more = len(self.violations) - limit
        return shown + (f"; ... {more} more" if more > 0 else "")
