"""Structured results returned by every validator in the workbench."""

from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass
class CheckReport:
    """Outcome of a law check.

    Attributes:
        name: What was checked (e.g. "distributive", "frame-hom")
        ok: True when every law held
        law: The first violated law, if any
        witness: Elements exhibiting the violation
        detail: Free-form counts or notes
    """
    name: str
    ok: bool = True
    law: Optional[str] = None
    witness: Optional[tuple] = None
    detail: dict[str, Any] = field(default_factory=dict)

    def fail(self, law: str, witness: tuple = (), **detail: Any) -> "CheckReport":
        """Mark the report failed at the first violation and return it."""
        if self.ok:
            self.ok = False
            self.law = law
            self.witness = tuple(witness)
        self.detail.update(detail)
        return self

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {"name": self.name, "passed": self.ok}
        if not self.ok:
            result["law"] = self.law
            result["witness"] = [repr(w) for w in (self.witness or ())]
        if self.detail:
            result["detail"] = {k: _jsonable(v) for k, v in sorted(self.detail.items())}
        return result


def _jsonable(value: Any) -> Any:
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return repr(value)


class PropertyViolation(Exception):
    """A cross-check between independent computations failed (indicates a modeling bug)."""

    def __init__(self, message: str, checks: Optional[list[CheckReport]] = None):
        super().__init__(message)
        self.checks = checks or []
