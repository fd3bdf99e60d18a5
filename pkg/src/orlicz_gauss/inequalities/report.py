"""Report rows and their JSON/CSV forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

HOLDS, VACUOUS, FAILED, ERROR = "holds", "vacuous", "failed", "error"
REL_TOL = 1e-8


def tolerance(rhs: float) -> float:
    return REL_TOL * max(1.0, abs(rhs)) if math.isfinite(rhs) else REL_TOL


@dataclass
class InequalityRow:
    """One verified inequality ``lhs <= rhs`` (or ``lhs == rhs`` for
    identities, ``equality=True``)."""

    name: str
    function_id: str
    phi_name: str
    lhs: float
    rhs: float
    params: dict = field(default_factory=dict)
    vacuous: bool = False
    equality: bool = False
    error: str = ""

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)

    @property
    def margin(self) -> float:
        if math.isinf(self.rhs) and math.isinf(self.lhs) and self.rhs == self.lhs:
            return math.nan
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        if self.error:
            return False
        if self.equality:
            return abs(self.lhs - self.rhs) <= tolerance(self.rhs)
        m = self.margin
        if math.isnan(m):
            return self.vacuous
        return m >= -tolerance(self.rhs)

    @property
    def status(self) -> str:
        if self.error:
            return ERROR
        if self.vacuous:
            return VACUOUS
        return HOLDS if self.holds else FAILED

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "function_id": self.function_id,
            "phi_name": self.phi_name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "holds": self.holds,
            "status": self.status,
            "params": self.params,
            "error": self.error,
        }

    @classmethod
    def failure(cls, name: str, function_id: str, phi_name: str, exc: Exception, params=None):
        return cls(name, function_id, phi_name, math.nan, math.nan, dict(params or {}),
                   error=f"{type(exc).__name__}: {exc}")


CSV_FIELDS = ["name", "function_id", "phi_name", "lhs", "rhs", "margin", "holds", "status", "params", "error"]


@dataclass
class InequalityReport:
    rows: List[InequalityRow] = field(default_factory=list)

    def summary(self) -> dict:
        st = [r.status for r in self.rows]
        return {
            "total": len(st),
            "holds": st.count(HOLDS),
            "vacuous": st.count(VACUOUS),
            "failed": st.count(FAILED) + st.count(ERROR),
            "errors": st.count(ERROR),
        }

    @property
    def ok(self) -> bool:
        return self.summary()["failed"] == 0

    def to_dict(self) -> dict:
        return {"summary": self.summary(), "rows": [r.to_dict() for r in self.rows]}
