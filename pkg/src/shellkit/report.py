"""Deterministic CSV and JSON report writers.

CSV files carry a header row and 17-significant-digit decimal numbers; JSON
summaries are schema-versioned, key-sorted, and contain no timestamps, so
identical configurations and seeds reproduce byte-identical artifacts.
"""

import json
import os

SCHEMA = "shellkit-report/1"


def fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if not isinstance(v, str) else v
                              for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


class Check:
    """One named pass/fail measurement for the summary."""

    def __init__(self, name, measured, tolerance, mode="max"):
        self.name = name
        self.measured = float(measured)
        self.tolerance = float(tolerance)
        if mode == "max":
            self.passed = self.measured <= self.tolerance
        elif mode == "min":
            self.passed = self.measured >= self.tolerance
        else:
            raise ValueError(f"unknown check mode {mode!r}")
        self.mode = mode

    def as_dict(self):
        return {"name": self.name, "measured": self.measured,
                "tolerance": self.tolerance, "mode": self.mode,
                "pass": self.passed}


def write_summary(path, verb, seed, checks, extra=None):
    payload = {
        "schema": SCHEMA,
        "verb": verb,
        "seed": seed,
        "checks": [c.as_dict() for c in checks],
        "pass": all(c.passed for c in checks),
    }
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return payload["pass"]


def ensure_outdir(path):
    os.makedirs(path, exist_ok=True)
    return path
