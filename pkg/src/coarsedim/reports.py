"""Pass/fail reports with witnesses; serializable to JSON."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


@dataclass
class Report:
    """Outcome of a check.

    Truthiness follows ``passed`` so reports can be used directly in
    boolean context (``assert k_disjoint_check(cover, K)``).
    """

    name: str
    passed: bool
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    children: list["Report"] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed

    def child(self, name: str) -> "Report":
        for c in self.children:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "witnesses": [_plain(w) for w in self.witnesses],
            "details": {k: _plain(v) for k, v in sorted(self.details.items())},
            "children": [c.to_dict() for c in self.children],
        }

    def summary_lines(self, indent: int = 0) -> list[str]:
        mark = "PASS" if self.passed else "FAIL"
        lines = [f"{'  ' * indent}{mark}\t{self.name}"]
        for c in self.children:
            lines.extend(c.summary_lines(indent + 1))
        return lines


def combine(name: str, children: list[Report], **details: Any) -> Report:
    return Report(name, all(c.passed for c in children), details=dict(details), children=list(children))


def _plain(v: Any) -> Any:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return str(v)
