"""Verification entries and machine-readable run reports."""

from __future__ import annotations

import json
import platform
import sys
from dataclasses import dataclass, field


@dataclass
class VerificationEntry:
    """One checked identity: exact residual, pass/fail, wall time."""

    check: str
    anchor: str
    status: str
    residual: str
    seconds: float

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json_dict(self) -> dict:
        return {
            "check": self.check,
            "anchor": self.anchor,
            "status": self.status,
            "residual": self.residual,
            "seconds": round(self.seconds, 6),
        }


def entry(check: str, anchor: str, ok: bool, residual: str, seconds: float) -> VerificationEntry:
    return VerificationEntry(check, anchor, "pass" if ok else "fail", residual, seconds)


@dataclass
class VerificationReport:
    suite: str
    seed: int
    entries: list[VerificationEntry] = field(default_factory=list)

    def add(self, e: VerificationEntry) -> VerificationEntry:
        self.entries.append(e)
        return e

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "toolchain": f"python-{platform.python_version()}",
            "package_version": _package_version(),
            "passed": self.all_passed,
            "entries": [e.to_json_dict() for e in self.entries],
        }

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")


def _package_version() -> str:
    try:
        from importlib.metadata import version

        return version("qybe")
    except Exception:
        return "unknown"


def residual_summary(op) -> str:
    """Deterministic summary of a residual operator: 'zero' or entry count."""
    if op.is_zero():
        return "zero"
    return f"nonzero({len(op.entries)} entries)"
