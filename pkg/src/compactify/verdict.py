from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
UNKNOWN = "unknown"


@dataclass
class Verdict:
    """Outcome of a check: ``pass``, ``fail`` (counterexample) or ``unknown``.

    ``detail`` holds the JSON-ready payload: witnesses for a pass, the
    counterexample for a fail.
    """

    status: str
    check: str
    detail: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict[str, Any]:
        return {"check": self.check, "status": self.status, "detail": jsonable(self.detail)}


def jsonable(obj: Any) -> Any:
    """Recursively convert sets, tuples and objects with ``to_json`` for ``json.dumps``."""
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted((jsonable(v) for v in obj), key=repr)
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj
