"""Experiment report records and their JSON/CSV serialization.

Every report embeds the full configuration it was produced from, so any
report can be re-run from itself.  The JSON payload is written with
sorted keys; excluding wall_time it is byte-identical for a fixed seed
and configuration, regardless of thread count.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    n: int


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    seed: int | None = None
    spec: dict | None = None
    x: int | None = None
    estimate: float | None = None
    std_error: float | None = None
    oracle_value: float | None = None
    guard_band: float | None = None
    exhaustive: bool | None = None
    extras: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    wall_time: float | None = None

    def to_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "config": self.config,
            "seed": self.seed,
            "spec": self.spec,
            "x": self.x,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "oracle_value": self.oracle_value,
            "guard_band": self.guard_band,
            "exhaustive": self.exhaustive,
            "extras": self.extras,
            "warnings": self.warnings,
            "wall_time": self.wall_time,
        }
        return out

    def to_json(self, include_wall_time: bool = True) -> str:
        d = self.to_dict()
        if not include_wall_time:
            d.pop("wall_time")
        return json.dumps(d, sort_keys=True, indent=2, default=_coerce)

    def csv_row(self) -> dict:
        row = {
            "experiment": self.experiment,
            "seed": self.seed,
            "spec": json.dumps(self.spec, sort_keys=True) if self.spec else "",
            "x": self.x,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "oracle_value": self.oracle_value,
            "guard_band": self.guard_band,
            "exhaustive": self.exhaustive,
        }
        for key, val in sorted(self.extras.items()):
            row[key] = _coerce_csv(val)
        return row

    def human_table(self) -> str:
        rows = [
            ("experiment", self.experiment),
            ("spec", json.dumps(self.spec) if self.spec else "-"),
            ("x", self.x),
            ("seed", self.seed),
            ("estimate", self.estimate),
            ("std_error", self.std_error),
            ("oracle", self.oracle_value),
            ("guard_band", self.guard_band),
            ("exhaustive", self.exhaustive),
        ]
        rows += sorted(self.extras.items())
        if self.warnings:
            rows.append(("warnings", "; ".join(self.warnings)))
        width = max(len(str(k)) for k, _ in rows)
        lines = [f"{k:<{width}}  {v}" for k, v in rows if v is not None]
        return "\n".join(lines)


def _coerce(obj):
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _coerce_csv(val):
    if isinstance(val, (dict, list)):
        return json.dumps(val, sort_keys=True, default=_coerce)
    return val


def write_csv(reports, path) -> None:
    """One CSV row per report; the column set is the union across reports."""
    rows = [r.csv_row() for r in reports]
    fields = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
