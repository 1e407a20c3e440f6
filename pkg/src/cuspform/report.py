"""Check reports with deterministic JSON serialization.

Every verification routine returns a Report: a flat list of named checks,
each pass or fail, a failing check always carrying a residual witness (and a
location tag like "i=2 j=5 a=1" when the equation has slots).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .ratpoly import Poly, format_poly


@dataclass
class Check:
    name: str
    status: str                 # "pass" | "fail"
    location: str | None = None
    residual: str | None = None


@dataclass
class Report:
    case: str
    seed: int = 0
    trials: int = 0             # echoed by the CLI; not serialized
    checks: list = field(default_factory=list)

    def add_pass(self, name, location=None):
        self.checks.append(Check(name, "pass", location))

    def add_fail(self, name, residual, location=None):
        if isinstance(residual, Poly):
            residual = format_poly(residual)
        elif residual is not None:
            residual = str(residual)
        self.checks.append(Check(name, "fail", location, residual))

    def add(self, name, ok, residual=None, location=None):
        if ok:
            self.add_pass(name, location)
        else:
            self.add_fail(name, residual, location)

    def extend(self, other):
        self.checks.extend(other.checks)
        return self

    def ok(self):
        return all(c.status == "pass" for c in self.checks)

    def failures(self):
        return [c for c in self.checks if c.status != "pass"]

    def check_dicts(self):
        return [
            {"name": c.name, "status": c.status,
             "location": c.location, "residual": c.residual}
            for c in self.checks
        ]

    def to_json(self):
        obj = {
            "case": self.case,
            "seed": self.seed,
            "checks": self.check_dicts(),
        }
        return json.dumps(obj, indent=2, sort_keys=False)
