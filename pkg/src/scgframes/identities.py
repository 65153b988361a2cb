"""Checks of the subset-splitting identities and inequalities for g-frames.

Every check evaluates both sides from the raw operator blocks so that the
algebraic shortcut used in the proofs (``P + Q = I`` splits of the frame
operator) is not silently reused as its own evidence.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .core import GOperatorFamily, SubsetMask, _check_mask, _check_vector, analysis_energy
from .engine import (
    PARSEVAL_TOL,
    canonical_dual,
    frame_operator,
    is_parseval,
    mixed_operator,
    require_frame,
    verify_alternate_dual,
)
from .errors import PreconditionError
from .reports import CheckName, IdentityCheck

DEFAULT_LAMBDA_GRID = tuple(k / 10 for k in range(11))
IDENTITY_RTOL = 1e-9
INEQUALITY_RTOL = 1e-10


def lambda_coefficients(lam: float) -> tuple[float, float]:
    """Weights ``(2l - l^2, 1 - l^2)`` on the (X_1, X_1^c) energies."""
    return 2 * lam - lam * lam, 1 - lam * lam


def _check_grid(grid):
    grid = tuple(float(x) for x in grid)
    if any(x < 0 or x > 1 for x in grid):
        raise PreconditionError("lambda grid must lie in [0, 1]")
    return grid


def _witness(f, mask, lam=None):
    w = {"f_norm": float(np.linalg.norm(f)), "mask": mask.included.tolist()}
    if lam is not None:
        w["lambda"] = lam
    return w


def check_operator_lemma_PQ(P, Q, lambda_grid=DEFAULT_LAMBDA_GRID, tol: float = 1e-10) -> list[IdentityCheck]:
    """Verify ``P - P*P = Q* - Q*Q`` and, per lambda,
    ``P*P + lambda (Q* + Q) >= (1 - (lambda - 1)^2) I``.

    The first entry is the equality (residual is a spectral norm); the rest
    are inequalities whose ``lhs`` is the smallest eigenvalue of the
    Hermitian part of the left operator.
    """
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    n = P.shape[0]
    eye = np.eye(n)
    scale = max(1.0, np.linalg.norm(P, 2), np.linalg.norm(Q, 2)) ** 2
    if np.linalg.norm(P + Q - eye, 2) > tol * scale:
        raise PreconditionError("P + Q differs from the identity")
    Ph, Qh = P.conj().T, Q.conj().T
    lhs = P - Ph @ P
    rhs = Qh - Qh @ Q
    checks = [
        IdentityCheck(
            CheckName.OPERATOR_LEMMA,
            float(np.linalg.norm(lhs - rhs, 2)),
            0.0,
            tol * scale,
            witness={"part": "P - P*P = Q* - Q*Q"},
        )
    ]
    for lam in _check_grid(lambda_grid):
        op = Ph @ P + lam * (Qh + Q)
        bound = 1 - (lam - 1) ** 2
        # smallest eigenvalue of (op - bound I) >= 0  <=>  lambda_min(op) >= bound
        checks.append(
            IdentityCheck(
                CheckName.OPERATOR_LEMMA,
                linalg.lambda_min(op),
                bound,
                tol * scale,
                kind="inequality",
                lam=lam,
                witness={"part": "P*P + lambda(Q*+Q) >= (1-(lambda-1)^2) I"},
            )
        )
    return checks


def verify_parseval_identity(family: GOperatorFamily, mask: SubsetMask, f, tol: float = IDENTITY_RTOL) -> IdentityCheck:
    """``E_{X_1}(f) - ||S_{X_1} f||^2 = E_{X_1^c}(f) - ||S_{X_1^c} f||^2`` for Parseval families."""
    if not is_parseval(family, PARSEVAL_TOL):
        raise PreconditionError("family is not Parseval; parsevalize it first")
    f = _check_vector(family, f)
    mask = _check_mask(family, mask)
    comp = mask.complement()
    s1 = frame_operator(family, mask).apply(f)
    s2 = frame_operator(family, comp).apply(f)
    lhs = analysis_energy(family, f, mask) - float(np.vdot(s1, s1).real)
    rhs = analysis_energy(family, f, comp) - float(np.vdot(s2, s2).real)
    fn2 = float(np.vdot(f, f).real)
    return IdentityCheck(
        CheckName.PARSEVAL_IDENTITY, lhs, rhs, tol * max(fn2, np.finfo(float).tiny), witness=_witness(f, mask)
    )


def verify_canonical_dual_inequality(
    family: GOperatorFamily,
    mask: SubsetMask,
    f,
    lambda_grid=DEFAULT_LAMBDA_GRID,
    tol: float = IDENTITY_RTOL,
    ineq_tol: float = INEQUALITY_RTOL,
) -> list[IdentityCheck]:
    """Canonical-dual splitting identity and its lambda lower bounds.

    The first check is the equality
    ``sum ||dual S_{X1} f||^2 + E_{X1^c}(f) = sum ||dual S_{X1^c} f||^2 + E_{X1}(f)``;
    the following ones assert, per lambda, that this common value dominates
    ``(2l - l^2) E_{X1}(f) + (1 - l^2) E_{X1^c}(f)``.
    """
    grid = _check_grid(lambda_grid)
    s = require_frame(family)
    f = _check_vector(family, f)
    mask = _check_mask(family, mask)
    comp = mask.complement()
    dual = canonical_dual(family)
    full = SubsetMask.full(family.n_points)
    s1f = frame_operator(family, mask).apply(f)
    s2f = frame_operator(family, comp).apply(f)
    e1 = analysis_energy(family, f, mask)
    e2 = analysis_energy(family, f, comp)
    lhs = analysis_energy(dual, s1f, full) + e2
    rhs = analysis_energy(dual, s2f, full) + e1
    scale = max(float(np.vdot(f, f).real) * max(1.0, linalg.lambda_max(s.matrix)), np.finfo(float).tiny)
    checks = [
        IdentityCheck(CheckName.CANONICAL_DUAL_INEQUALITY, lhs, rhs, tol * scale, witness=_witness(f, mask))
    ]
    value = 0.5 * (lhs + rhs)
    for lam in grid:
        a, b = lambda_coefficients(lam)
        checks.append(
            IdentityCheck(
                CheckName.CANONICAL_DUAL_INEQUALITY,
                value,
                a * e1 + b * e2,
                ineq_tol * scale,
                kind="inequality",
                lam=lam,
                witness=_witness(f, mask, lam),
            )
        )
    return checks


def _require_dual(family, alt_dual, tol):
    report = verify_alternate_dual(family, alt_dual, tol)
    if not report.passed:
        raise PreconditionError(
            f"candidate is not an alternate dual (residuals {report.residuals})"
        )


def _split_quantities(family, alt_dual, mask, f):
    f = _check_vector(family, f)
    mask = _check_mask(family, mask)
    comp = mask.complement()
    f1 = mixed_operator(family, alt_dual, mask) @ f
    f2 = mixed_operator(family, alt_dual, comp) @ f
    # <F_{X} f, f> = sum w <G f, Lambda f>, evaluated blockwise
    ip1 = _dual_pairing(family, alt_dual, mask, f)
    ip2 = _dual_pairing(family, alt_dual, comp, f)
    return f, mask, f1, f2, ip1, ip2


def _dual_pairing(family, alt_dual, mask, f) -> complex:
    terms = [
        w * np.vdot(lam @ f, g @ f)
        for (i, j, w, lam), (_, _, _, g) in zip(family.iter_blocks(), alt_dual.iter_blocks())
        if mask.included[i]
    ]
    return complex(np.sum(terms)) if terms else 0j


def verify_alternate_dual_inequality(
    family: GOperatorFamily,
    alt_dual: GOperatorFamily,
    mask: SubsetMask,
    f,
    lambda_grid=DEFAULT_LAMBDA_GRID,
    tol: float = IDENTITY_RTOL,
    ineq_tol: float = INEQUALITY_RTOL,
    dual_tol: float = 1e-9,
) -> list[IdentityCheck]:
    """Real-part splitting identity for an alternate dual and its lambda bounds."""
    grid = _check_grid(lambda_grid)
    _require_dual(family, alt_dual, dual_tol)
    f, mask, f1, f2, ip1, ip2 = _split_quantities(family, alt_dual, mask, f)
    lhs = ip2.real + float(np.vdot(f1, f1).real)
    rhs = ip1.real + float(np.vdot(f2, f2).real)
    scale = max(float(np.vdot(f, f).real), np.finfo(float).tiny)
    checks = [
        IdentityCheck(CheckName.ALTERNATE_DUAL_INEQUALITY, lhs, rhs, tol * scale, witness=_witness(f, mask))
    ]
    value = 0.5 * (lhs + rhs)
    for lam in grid:
        a, b = lambda_coefficients(lam)
        checks.append(
            IdentityCheck(
                CheckName.ALTERNATE_DUAL_INEQUALITY,
                value,
                a * ip1.real + b * ip2.real,
                ineq_tol * scale,
                kind="inequality",
                lam=lam,
                witness=_witness(f, mask, lam),
            )
        )
    return checks


def verify_general_complex_identity(
    family: GOperatorFamily,
    alt_dual: GOperatorFamily,
    mask: SubsetMask,
    f,
    tol: float = 1e-10,
    dual_tol: float = 1e-9,
) -> IdentityCheck:
    """``<F_{X1^c} f, f> + ||F_{X1} f||^2 = conj(<F_{X1} f, f>) + ||F_{X1^c} f||^2``."""
    _require_dual(family, alt_dual, dual_tol)
    f, mask, f1, f2, ip1, ip2 = _split_quantities(family, alt_dual, mask, f)
    lhs = ip2 + float(np.vdot(f1, f1).real)
    rhs = ip1.conjugate() + float(np.vdot(f2, f2).real)
    scale = max(float(np.vdot(f, f).real), np.finfo(float).tiny)
    return IdentityCheck(CheckName.GENERAL_COMPLEX_IDENTITY, complex(lhs), complex(rhs), tol * scale, witness=_witness(f, mask))


def parsevalize(family: GOperatorFamily) -> GOperatorFamily:
    """Conjugate by ``S^{-1/2}``: blocks ``Lambda_{ij} S^{-1/2}`` form a Parseval family."""
    s = require_frame(family)
    r = linalg.invsqrt_psd(s.matrix)
    return family.map_blocks(lambda b: b @ r)
