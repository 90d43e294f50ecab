"""Small record type shared by the verification suites."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

EXACT_PASS = "exact-pass"
PASS = "pass"
FAIL = "fail"
INFO = "info"


@dataclass
class Check:
    name: str
    source: str
    status: str
    detail: dict[str, Any] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def exact(name: str, source: str, ok: bool, **detail) -> Check:
    return Check(name, source, EXACT_PASS if ok else FAIL, detail)


def numeric(name: str, source: str, value: float, tol: float, **detail) -> Check:
    detail = {"value": float(value), "tolerance": tol, **detail}
    return Check(name, source, PASS if value <= tol else FAIL, detail)
