"""Structured pass/fail records for verification runs."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

SCHEMA = "crlab/1"
STATUSES = ("pass", "fail", "skip")


def _jsonable(x: Any) -> Any:
    """Convert numpy scalars, complex numbers and tuples into plain JSON values."""
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "tolist") and not isinstance(x, (str, bytes)):
        return _jsonable(x.tolist())
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, complex):
        return {"re": _jsonable(x.real), "im": _jsonable(x.imag)}
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return repr(x)
        return x
    for conv in (float, complex):
        try:
            return _jsonable(conv(x))
        except (TypeError, ValueError):
            continue
    return str(x)


@dataclass
class CheckRecord:
    id: str
    anchor: str
    status: str
    margin: float | None = None
    witness: Any = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")
        if not self.anchor:
            raise ValueError("every check needs an anchor (or 'plumbing')")

    def to_dict(self) -> dict:
        return {"id": self.id, "anchor": self.anchor, "status": self.status,
                "margin": _jsonable(self.margin), "witness": _jsonable(self.witness)}


@dataclass
class VerificationReport:
    suite: str
    checks: list[CheckRecord] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add(self, id: str, anchor: str, passed: bool | None, margin=None, witness=None) -> CheckRecord:
        """Append a check; ``passed=None`` records a skip."""
        status = "skip" if passed is None else ("pass" if passed else "fail")
        rec = CheckRecord(id, anchor, status, None if margin is None else float(margin), witness)
        self.checks.append(rec)
        return rec

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(CheckRecord(prefix + c.id, c.anchor, c.status, c.margin, c.witness))

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if c.status == "fail"]

    def get(self, id: str) -> CheckRecord:
        for c in self.checks:
            if c.id == id:
                return c
        raise KeyError(id)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "suite": self.suite,
            "passed": self.passed,
            "config": _jsonable(self.config),
            "checks": [c.to_dict() for c in self.checks],
            "wall_time": self.wall_time,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def summary_lines(self) -> list[str]:
        return [f"[{c.status.upper():4s}] {c.id}  margin={c.margin!r}" for c in self.checks]
