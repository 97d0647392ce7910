"""Witness reports: the uniform output of every verification run.

A report names the claim it checked, the parameters, and the exact values on
both sides of the inequality (rendered as `m*2^e` strings), so a failed run is
reproducible from the report alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

__all__ = ["WitnessReport", "reports_to_json", "write_reports"]


@dataclass(frozen=True)
class WitnessReport:
    claim: str
    params: dict[str, Any] = field(default_factory=dict)
    lhs: str = ""
    rhs: str = ""
    passed: bool = True

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "claim": self.claim,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "pass": self.passed,
        }

    def is_informational(self) -> bool:
        return bool(self.params.get("informational"))


def reports_to_json(reports: Iterable[WitnessReport]) -> str:
    """Serialize reports sorted by claim key, byte-stable for a fixed input."""
    items = sorted(reports, key=lambda r: r.claim)
    return json.dumps(
        [r.to_json_dict() for r in items],
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=True,
    )


def write_reports(path: str, reports: Iterable[WitnessReport]) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(reports_to_json(reports))
        fh.write("\n")
