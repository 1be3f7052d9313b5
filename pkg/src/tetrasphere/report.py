"""Verification records and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

__all__ = ["SCHEMA_VERSION", "Check", "CheckRecord", "SuiteReport", "VerificationReport", "record"]

SCHEMA_VERSION = 1


@dataclass
class Check:
    """One residual produced by a suite for one instance."""

    check_id: str
    residual: float | None
    tol: float
    flags: list[str] = field(default_factory=list)


@dataclass
class CheckRecord:
    check_id: str
    instance_seed: int
    residual: float | None
    tol: float
    flags: list[str]

    @property
    def flagged(self) -> bool:
        return bool(self.flags)

    @property
    def passed(self) -> bool:
        return self.residual is not None and self.residual <= self.tol

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "instance_seed": self.instance_seed,
            "residual": self.residual,
            "tol": self.tol,
            "pass": self.passed,
            "flags": list(self.flags),
        }


def _clean(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return None
    return float(x)


@dataclass
class SuiteReport:
    suite: str
    records: list[CheckRecord]

    @property
    def failures(self) -> list[CheckRecord]:
        """Unflagged records over tolerance; flagged ones never count."""
        return [r for r in self.records if not r.flagged and not r.passed]

    def summary(self) -> dict:
        plain = [r for r in self.records if not r.flagged]
        residuals = [r.residual for r in plain if r.residual is not None]
        return {
            "records": len(self.records),
            "max_residual": max(residuals) if residuals else None,
            "pass_rate": (sum(r.passed for r in plain) / len(plain)) if plain else None,
            "failed": len(self.failures),
            "flagged": len(self.records) - len(plain),
        }

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "summary": self.summary(),
            "records": [r.to_dict() for r in self.records],
        }


@dataclass
class VerificationReport:
    seed: int
    trials: int
    suites: list[SuiteReport]

    @property
    def ok(self) -> bool:
        return all(not s.failures for s in self.suites)

    def summary(self) -> dict:
        sums = [s.summary() for s in self.suites]
        maxes = [x["max_residual"] for x in sums if x["max_residual"] is not None]
        return {
            "suites": len(self.suites),
            "records": sum(x["records"] for x in sums),
            "failed": sum(x["failed"] for x in sums),
            "flagged": sum(x["flagged"] for x in sums),
            "max_residual": max(maxes) if maxes else None,
            "ok": self.ok,
        }

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "trials": self.trials,
            "summary": self.summary(),
            "suites": [s.to_dict() for s in self.suites],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, allow_nan=False) + "\n"


def record(c: Check, seed: int) -> CheckRecord:
    res = _clean(c.residual)
    flags = list(c.flags)
    if c.residual is not None and res is None:
        flags.append("non-finite-residual")
    return CheckRecord(c.check_id, seed, res, c.tol, flags)
