"""Frame operators, optimal bounds, canonical and alternate duals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .core import (
    FrameBounds,
    GOperatorFamily,
    SubsetMask,
    _check_mask,
    _check_vector,
    default_tolerance,
    encode_matrix,
)
from .errors import DimensionError, NotAFrameError
from .reports import VerificationReport

PARSEVAL_TOL = 1e-9


@dataclass(frozen=True)
class FrameOperator:
    """Hermitian PSD matrix ``S_{X_1} = sum_{i in X_1} w_i sum_j Lambda*Lambda``."""

    matrix: np.ndarray
    family: GOperatorFamily
    mask: SubsetMask

    def apply(self, f) -> np.ndarray:
        return self.matrix @ np.asarray(f, dtype=complex)

    def quadratic(self, f) -> float:
        f = np.asarray(f, dtype=complex)
        return float(np.vdot(f, self.matrix @ f).real)

    def eigenvalues(self) -> np.ndarray:
        return linalg.eigh(self.matrix)[0]

    def to_dict(self) -> dict:
        return {"matrix": encode_matrix(self.matrix), "mask": self.mask.included.tolist()}


@dataclass(frozen=True, eq=False)
class DualFamily(GOperatorFamily):
    """A family used as a dual; ``provenance`` is ``canonical`` or ``alternate``."""

    provenance: str = "alternate"

    def __init__(self, family: GOperatorFamily, provenance: str = "alternate"):
        super().__init__(family.space, family.index_set, family.dim, family.blocks)
        object.__setattr__(self, "provenance", provenance)


def frame_operator(family: GOperatorFamily, mask: SubsetMask | None = None) -> FrameOperator:
    family.require_valid()
    mask = _check_mask(family, mask)
    a, w = family.stacked(mask)
    s = a.conj().T @ (w[:, None] * a)
    return FrameOperator(linalg.hermitian_part(s), family, mask)


def mixed_operator(family: GOperatorFamily, other: GOperatorFamily, mask: SubsetMask | None = None) -> np.ndarray:
    """``sum_{i in mask} w_i sum_j Lambda_{ij}^* G_{ij}`` as a matrix."""
    family.require_valid()
    other.require_valid()
    if not family.same_shape(other):
        raise DimensionError("families differ in space, index set or block shapes")
    mask = _check_mask(family, mask)
    a, w = family.stacked(mask)
    g, _ = other.stacked(mask)
    return a.conj().T @ (w[:, None] * g)


def frame_bounds(family: GOperatorFamily) -> FrameBounds:
    """Optimal bounds: extremal eigenvalues of the full frame operator."""
    evals = frame_operator(family).eigenvalues()
    lower = max(float(evals[0]), 0.0)
    return FrameBounds(lower, max(float(evals[-1]), lower))


def is_frame(family: GOperatorFamily) -> bool:
    evals = frame_operator(family).eigenvalues()
    return bool(evals[0] > linalg.rank_threshold(evals))


def is_parseval(family: GOperatorFamily, tol: float = PARSEVAL_TOL) -> bool:
    s = frame_operator(family).matrix
    return bool(np.linalg.norm(s - np.eye(family.dim), 2) <= tol)


def is_bessel(family: GOperatorFamily) -> tuple[bool, float]:
    """Always true in finite dimensions; returns the optimal Bessel bound too."""
    return True, frame_bounds(family).upper


def canonical_dual(family: GOperatorFamily) -> DualFamily:
    """Blocks ``Lambda_{ij} S^{-1}``."""
    s_inv = linalg.inv_psd(frame_operator(family).matrix)
    return DualFamily(family.map_blocks(lambda b: b @ s_inv), "canonical")


def reconstruct(family: GOperatorFamily, dual: GOperatorFamily, f) -> np.ndarray:
    f = _check_vector(family, f)
    return mixed_operator(family, dual) @ f


def reconstruction_residual(family: GOperatorFamily, dual: GOperatorFamily, f) -> float:
    f = _check_vector(family, f)
    return float(np.linalg.norm(reconstruct(family, dual, f) - f))


def verify_alternate_dual(family: GOperatorFamily, candidate: GOperatorFamily, tol: float | None = None) -> VerificationReport:
    """Check ``sum w Lambda^* G = I`` and ``sum w G^* Lambda = I``."""
    if tol is None:
        tol = default_tolerance(family)
    eye = np.eye(family.dim)
    r1 = float(np.linalg.norm(mixed_operator(family, candidate) - eye, 2))
    r2 = float(np.linalg.norm(mixed_operator(candidate, family) - eye, 2))
    status = "pass" if max(r1, r2) <= tol else "fail"
    return VerificationReport(
        name="alternate_dual",
        status=status,
        residuals={"synthesis_by_family": r1, "synthesis_by_candidate": r2},
        tol=tol,
    )


def require_frame(family: GOperatorFamily) -> FrameOperator:
    s = frame_operator(family)
    evals = s.eigenvalues()
    if evals[0] <= linalg.rank_threshold(evals):
        raise NotAFrameError(f"lower frame bound {evals[0]:.3e} is numerically zero")
    return s
