"""Structured pass/fail reports for certificate-producing operations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    @property
    def residuals(self) -> list[str]:
        return [self.detail] if self.detail else []


@dataclass
class Report:
    command: str
    checks: list[Check] = field(default_factory=list)
    necessary_only: bool = False
    notes: list[str] = field(default_factory=list)
    millis: float | None = None

    def add(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, passed, detail))
        return passed

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        if not self.passed:
            return "fail"
        return "necessary-only" if self.necessary_only else "pass"

    @property
    def exit_code(self) -> int:
        return 0 if self.verdict == "pass" else 1

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "verdict": self.verdict,
            "checks": [{"name": c.name,
                        "verdict": "pass" if c.passed else "fail",
                        "residuals": c.residuals}
                       for c in self.checks],
            **({"notes": self.notes} if self.notes else {}),
            "millis": self.millis,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [f"{self.command}: {self.verdict}"]
        for c in self.checks:
            mark = "ok" if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}" + (f": {c.detail}" if c.detail else ""))
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)
