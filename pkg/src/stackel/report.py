"""Verification records shared by every check and serialized by the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List

from .exact import BigRational, GaussianRational, PhasePoly, q_str


@dataclass
class Check:
    """One atomic exact comparison."""
    name: str
    passed: bool
    witness: Any = None

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "witness": jsonable(self.witness)}


@dataclass
class VerificationReport:
    name: str
    anchor: str
    checks: List[Check] = field(default_factory=list)
    expected: bool = True
    info: Dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, passed: bool, witness=None) -> bool:
        self.checks.append(Check(name, bool(passed), witness))
        return bool(passed)

    @property
    def verdict(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def as_expected(self) -> bool:
        return self.verdict == self.expected

    def failed(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "verdict": "PASS" if self.verdict else "FAIL",
            "expected": "PASS" if self.expected else "FAIL",
            "as_expected": self.as_expected,
            "n_checks": len(self.checks),
            "n_failed": len(self.failed()),
            "checks": [c.to_dict() for c in self.checks],
            "info": jsonable(self.info),
        }

    def __str__(self):
        tag = "PASS" if self.verdict else "FAIL"
        return f"[{tag}] {self.name} ({len(self.checks) - len(self.failed())}/{len(self.checks)})"


def poly_witness(p: PhasePoly):
    """Residual size summary: number of terms and total degree."""
    return {"terms": len(p), "degree": p.degree()}


def jsonable(x):
    if isinstance(x, BigRational):
        return q_str(x)
    if isinstance(x, GaussianRational):
        return {"re": q_str(x.re), "im": q_str(x.im)}
    if isinstance(x, PhasePoly):
        return poly_witness(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return x
    return str(x)
