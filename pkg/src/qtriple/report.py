"""Tiny shared shape for machine-readable check results."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    tolerance: float | None = None
    value: float | None = None

    def to_dict(self) -> dict:
        # plain builtins only: numpy scalars are not JSON serializable
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "detail": self.detail,
            "tolerance": None if self.tolerance is None else float(self.tolerance),
            "value": None if self.value is None else float(self.value),
        }


def all_passed(checks) -> bool:
    return all(c.passed for c in checks)
