"""Result records returned by the verifiers, with JSON encoding."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


class CheckName(str, enum.Enum):
    PARSEVAL_IDENTITY = "ParsevalIdentity"
    CANONICAL_DUAL_INEQUALITY = "CanonicalDualInequality"
    ALTERNATE_DUAL_INEQUALITY = "AlternateDualInequality"
    GENERAL_COMPLEX_IDENTITY = "GeneralComplexIdentity"
    OPERATOR_LEMMA = "OperatorLemma"
    FIBER_NORM_IDENTITY = "FiberNormIdentity"


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and complex numbers to plain JSON types."""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()] if value.ndim else to_jsonable(value.item())
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def digest(obj: Any) -> str:
    """Stable SHA-256 of a JSON-able object (used for input digests)."""
    text = json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class IdentityCheck:
    """Outcome of one identity or inequality evaluated at one witness.

    For identities ``passed`` means ``|lhs - rhs| <= tol``; for
    inequalities ``lhs`` is the dominating side and ``passed`` means
    ``slack = lhs - rhs >= -tol``.
    """

    name: CheckName
    lhs: complex | float
    rhs: complex | float
    tol: float
    kind: str = "identity"
    lam: float | None = None
    witness: dict = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return float(abs(self.lhs - self.rhs))

    @property
    def slack(self) -> float | None:
        if self.kind != "inequality":
            return None
        return float(np.real(self.lhs - self.rhs))

    @property
    def passed(self) -> bool:
        if self.kind == "inequality":
            return self.slack >= -self.tol
        return self.residual <= self.tol

    def to_dict(self) -> dict:
        return to_jsonable(
            {
                "name": self.name,
                "kind": self.kind,
                "lambda": self.lam,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "residual": self.residual,
                "slack": self.slack,
                "tol": self.tol,
                "passed": self.passed,
                "witness": self.witness,
            }
        )


@dataclass
class VerificationReport:
    """Pass/fail record for a theorem-level check.

    ``status`` is ``"pass"``, ``"fail"`` or ``"not_applicable"``; the last
    means the hypothesis of the statement does not hold, so the implication
    is vacuous and ``passed`` is True.
    """

    name: str
    status: str
    residuals: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    tol: float = 0.0
    witness: Any = None
    notes: list = field(default_factory=list)
    seed: int | None = None
    inputs_digest: str | None = None

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "not_applicable")

    def to_dict(self) -> dict:
        return to_jsonable(
            {
                "name": self.name,
                "status": self.status,
                "passed": self.passed,
                "residuals": self.residuals,
                "values": self.values,
                "tol": self.tol,
                "witness": self.witness,
                "notes": self.notes,
                "seed": self.seed,
                "inputs_digest": self.inputs_digest,
            }
        )

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)
