"""Check records shared by the verification routines and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
FLAG = "flag"
ERROR = "error"


@dataclass
class Check:
    """One verified identity (or one flagged/skipped sub-check)."""

    label: str
    status: str
    residual: str = ""
    detail: str = ""


@dataclass
class CheckSet:
    """Result of one verification call: a list of checks plus context."""

    name: str
    index: tuple = ()
    checks: list = field(default_factory=list)

    def add(self, label, status, residual="", detail=""):
        self.checks.append(Check(label, status, residual, detail))

    def add_residual(self, label, ok, residual_str, detail=""):
        self.add(label, PASS if ok else FAIL, residual_str, detail)

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if c.status == FAIL]

    @property
    def flags(self):
        return [c for c in self.checks if c.status == FLAG]

    def merge(self, other: "CheckSet"):
        self.checks.extend(other.checks)
        return self

    def as_dict(self):
        return {
            "name": self.name,
            "index": list(self.index),
            "checks": [
                {
                    "label": c.label,
                    "status": c.status,
                    "residual": c.residual,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }
