"""Run reports and atomic artifact writers shared by the CLI drivers.

CSV cells are rendered with Python's shortest round-trip float repr, so a
rerun with the same config and seed reproduces every output byte for byte.
All files are written to a temporary sibling and renamed into place.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path


def _format_cell(value) -> str:
    if isinstance(value, (bool,)):
        return "1" if value else "0"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, str):
        return value
    return repr(float(value))


def _atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv_atomic(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(cell) for cell in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_json_atomic(path, obj) -> None:
    _atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


@dataclass(frozen=True)
class Check:
    """One measured quantity against its threshold."""

    name: str
    value: float
    threshold: float
    comparator: str = "<"   # value <comparator> threshold

    @property
    def passed(self) -> bool:
        value, threshold = self.value, self.threshold
        if self.comparator == "<":
            return value < threshold
        if self.comparator == "<=":
            return value <= threshold
        if self.comparator == ">":
            return value > threshold
        if self.comparator == ">=":
            return value >= threshold
        if self.comparator == "==":
            return value == threshold
        raise ValueError(f"unknown comparator {self.comparator!r}")

    def to_json_dict(self) -> dict:
        return {"name": self.name, "value": float(self.value),
                "threshold": float(self.threshold), "comparator": self.comparator,
                "passed": self.passed}

    def summary_line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"[{flag}] {self.name}: {self.value:.6g} "
                f"{self.comparator} {self.threshold:.6g}")


@dataclass
class RunReport:
    """Per-experiment bundle of checks, config echo and artifact paths."""

    experiment: str
    seed: int
    config: dict
    checks: list[Check] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)

    def add(self, name: str, value: float, threshold: float, comparator: str = "<") -> Check:
        check = Check(name, float(value), float(threshold), comparator)
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "passed": self.passed,
            "config": self.config,
            "checks": [check.to_json_dict() for check in self.checks],
            "artifacts": sorted(self.artifacts),
        }

    def write(self, path) -> None:
        write_json_atomic(path, self.to_json_dict())
