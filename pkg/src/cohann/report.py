"""Structured pass/fail reports and canonical JSON serialization.

Canonical payloads are deterministic for fixed inputs: keys sorted, no
whitespace variance, ideals rendered as reduced monic generator strings.
Timings never enter the canonical payload.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import List, Optional


@dataclass
class CheckItem:
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "status": "pass" if self.passed else "fail",
                "detail": self.detail}


@dataclass
class VerificationReport:
    """Outcome of one lemma/theorem instance check."""

    name: str
    checks: List[CheckItem] = field(default_factory=list)
    payload: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(CheckItem(name, bool(passed), detail))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "payload": self.payload,
        }


@dataclass
class Report:
    """Canonical result record for one CLI command run."""

    command: str
    session_digest: str
    inputs: dict
    result: dict
    checks: List[CheckItem] = field(default_factory=list)
    counters: dict = field(default_factory=dict)
    status: str = "ok"  # ok | check-failed | error

    def as_dict(self):
        return {
            "command": self.command,
            "session": self.session_digest,
            "inputs": self.inputs,
            "result": self.result,
            "checks": [c.as_dict() for c in self.checks],
            "counters": self.counters,
            "status": self.status,
        }

    def canonical_json(self) -> str:
        return canonical_json(self.as_dict())

    @property
    def exit_code(self) -> int:
        if self.status == "error":
            return 1
        if self.status == "check-failed" or not all(c.passed for c in self.checks):
            return 2
        return 0


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def content_digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()
