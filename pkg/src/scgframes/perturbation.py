"""Stability of g-frames under perturbation.

Given a frame ``Lambda`` and a second family ``Gamma`` on the same blocks,
the perturbation condition asks, for every ``f``,

    sqrt(<D f, f>) <= l1 sqrt(<S_Lambda f, f>) + l2 sqrt(<S_Gamma f, f>) + mu ||f||

where ``D`` is the frame operator of ``Lambda - Gamma``.  Under the gate
``max(l1 + mu / sqrt(A), l2) < 1`` the perturbed family is a frame with
explicitly predicted bounds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .core import FrameBounds, GOperatorFamily
from .engine import frame_bounds, frame_operator
from .errors import DimensionError, GateError
from .fixtures import random_parseval, random_vector
from .reports import VerificationReport

DEFAULT_STARTS = 32
DEFAULT_ITERATIONS = 500
CONTAINMENT_RTOL = 1e-9


class Condition(str, enum.Enum):
    CERTIFIED = "CertifiedSufficient"
    SAMPLED_ONLY = "SampledOnly"
    COUNTEREXAMPLE = "CounterexampleFound"


@dataclass(frozen=True)
class PerturbationParams:
    lambda1: float = 0.0
    lambda2: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if min(self.lambda1, self.lambda2, self.mu) < 0:
            raise ValueError("perturbation parameters must be nonnegative")

    def gate(self, lower: float) -> bool:
        """``max(l1 + mu / sqrt(A), l2) < 1``; false whenever ``A <= 0``."""
        if lower <= 0:
            return False
        return max(self.lambda1 + self.mu / np.sqrt(lower), self.lambda2) < 1

    def as_dict(self) -> dict:
        return {"lambda1": self.lambda1, "lambda2": self.lambda2, "mu": self.mu}


@dataclass
class ConditionResult:
    condition: Condition
    witness: np.ndarray | None
    max_ratio: float | None
    certificate_lhs: float
    certificate_rhs: float


@dataclass
class PerturbationVerdict:
    condition: Condition
    predicted: FrameBounds | None
    actual: FrameBounds
    witness: np.ndarray | None = None
    gate: bool = False
    notes: list = field(default_factory=list)


def predicted_bounds(A: float, B: float, params: PerturbationParams) -> FrameBounds:
    """Closed-form bounds of the perturbed family.

    Raises GateError when the gate fails for ``A``.
    """
    if not params.gate(A):
        raise GateError(f"gate max(l1 + mu/sqrt(A), l2) < 1 fails for A={A}, {params}")
    l1, l2, mu = params.lambda1, params.lambda2, params.mu
    lower = A * (1 - (l1 + l2 + mu / np.sqrt(A)) / (1 + l2)) ** 2
    upper = B * (1 + (l1 + l2 + mu / np.sqrt(B)) / (1 - l2)) ** 2
    return FrameBounds(float(lower), float(upper))


def _operators(lam: GOperatorFamily, gam: GOperatorFamily):
    if not lam.same_shape(gam):
        raise DimensionError("perturbed family must share space, index set and block shapes")
    d = frame_operator(lam - gam).matrix
    return d, frame_operator(lam).matrix, frame_operator(gam).matrix


def _quad(m, f):
    return np.einsum("ik,ij,jk->k", f.conj(), m, f).real


def _ratio_and_grad(ops, coefs, mu, f, eps=1e-300):
    r = np.full(f.shape[1], -float(mu))
    g = np.zeros_like(f)
    for m, c in zip(ops, coefs):
        q = np.maximum(_quad(m, f), 0.0)
        root = np.sqrt(q)
        r += c * root
        g += c * (m @ f) / np.maximum(root, np.sqrt(eps))
    return r, g


def _ascent(ops, coefs, mu, starts, iterations):
    """Projected gradient ascent of the condition gap over the unit sphere.

    ``starts`` is an ``n x k`` matrix of unit columns, ascended in parallel
    with a per-column backtracking step.
    """
    f = starts / np.linalg.norm(starts, axis=0)
    r, g = _ratio_and_grad(ops, coefs, mu, f)
    step = np.ones(f.shape[1])
    for _ in range(iterations):
        g = g - f * np.sum(f.conj() * g, axis=0).real
        cand = f + step * g
        cand = cand / np.linalg.norm(cand, axis=0)
        r_new, g_new = _ratio_and_grad(ops, coefs, mu, cand)
        ok = r_new >= r
        f = np.where(ok, cand, f)
        r = np.where(ok, r_new, r)
        g = np.where(ok, g_new, g)
        step = np.where(ok, step * 1.5, step * 0.5)
        if np.all(step < 1e-14):
            break
    return r, f


def check_condition(
    lam: GOperatorFamily,
    gam: GOperatorFamily,
    params: PerturbationParams,
    starts: int = DEFAULT_STARTS,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    tol: float = 1e-9,
) -> ConditionResult:
    """Three-valued decision on the perturbation condition.

    1. A spectral certificate
       ``sqrt(lmax(D)) <= l1 sqrt(lmin(S_L)) + l2 sqrt(lmin(S_G)) + mu``
       proves the condition for all ``f``.
    2. Otherwise the gap is maximised over the unit sphere; a positive
       maximum is a counterexample.
    3. Otherwise the condition is only supported by sampling.
    """
    d, s_l, s_g = _operators(lam, gam)
    scale = max(1.0, np.sqrt(linalg.lambda_max(s_l)))
    cert_lhs = np.sqrt(max(linalg.lambda_max(d), 0.0))
    cert_rhs = (
        params.lambda1 * np.sqrt(max(linalg.lambda_min(s_l), 0.0))
        + params.lambda2 * np.sqrt(max(linalg.lambda_min(s_g), 0.0))
        + params.mu
    )
    if cert_lhs <= cert_rhs + tol * scale:
        return ConditionResult(Condition.CERTIFIED, None, None, float(cert_lhs), float(cert_rhs))

    n = lam.dim
    seqs = np.random.SeedSequence(seed).spawn(starts)
    cols = [random_vector(np.random.default_rng(s), n) for s in seqs]
    # deterministic extra starts: top eigenvector of D, bottom of S_Gamma and S_Lambda
    cols.append(linalg.eigh(d)[1][:, -1])
    cols.append(linalg.eigh(s_g)[1][:, 0])
    cols.append(linalg.eigh(s_l)[1][:, 0])
    x0 = np.stack(cols, axis=1).astype(complex)
    ops = (d, s_l, s_g)
    coefs = (1.0, -params.lambda1, -params.lambda2)
    r, f = _ascent(ops, coefs, params.mu, x0, iterations)
    best = int(np.argmax(r))
    max_r = float(r[best])
    witness = f[:, best]
    cond = Condition.COUNTEREXAMPLE if max_r > tol * scale else Condition.SAMPLED_ONLY
    return ConditionResult(cond, witness, max_r, float(cert_lhs), float(cert_rhs))


def condition_gap(lam: GOperatorFamily, gam: GOperatorFamily, params: PerturbationParams, f) -> float:
    """Gap ``lhs - rhs`` of the condition at one vector (positive = violated)."""
    d, s_l, s_g = _operators(lam, gam)
    f = np.asarray(f, dtype=complex).reshape(-1, 1)
    r, _ = _ratio_and_grad((d, s_l, s_g), (1.0, -params.lambda1, -params.lambda2), params.mu * float(np.linalg.norm(f)), f)
    return float(r[0])


def _contained(pred: FrameBounds, actual: FrameBounds, rtol: float):
    lo_slack = (actual.lower - pred.lower) / max(1.0, pred.lower)
    hi_slack = (pred.upper - actual.upper) / max(1.0, pred.upper)
    return lo_slack, hi_slack, lo_slack >= -rtol and hi_slack >= -rtol


def perturbation_verdict(lam, gam, params, **kw) -> PerturbationVerdict:
    base = frame_bounds(lam)
    gate = params.gate(base.lower)
    actual = frame_bounds(gam)
    cond = check_condition(lam, gam, params, **kw)
    predicted = predicted_bounds(base.lower, base.upper, params) if gate else None
    return PerturbationVerdict(cond.condition, predicted, actual, cond.witness, gate)


def verify_perturbation_theorem(
    lam: GOperatorFamily,
    gam: GOperatorFamily,
    params: PerturbationParams,
    rtol: float = CONTAINMENT_RTOL,
    **kw,
) -> VerificationReport:
    """Check that ``Gamma``'s optimal bounds lie within the predicted ones."""
    base = frame_bounds(lam)
    predicted = predicted_bounds(base.lower, base.upper, params)
    actual = frame_bounds(gam)
    cond = check_condition(lam, gam, params, **kw)
    values = {
        "A": base.lower,
        "B": base.upper,
        "predicted_lower": predicted.lower,
        "predicted_upper": predicted.upper,
        "actual_lower": actual.lower,
        "actual_upper": actual.upper,
        "condition": cond.condition.value,
        "params": params.as_dict(),
    }
    notes = []
    if cond.condition is Condition.COUNTEREXAMPLE:
        notes.append("condition violated at witness; the stability statement does not apply")
        return VerificationReport(
            "perturbation_theorem", "not_applicable", values=values, tol=rtol,
            witness=cond.witness, notes=notes,
        )
    if cond.condition is Condition.SAMPLED_ONLY:
        notes.append("condition not certified; containment checked empirically")
    lo, hi, ok = _contained(predicted, actual, rtol)
    return VerificationReport(
        "perturbation_theorem",
        "pass" if ok else "fail",
        residuals={"lower_slack": lo, "upper_slack": hi},
        values=values,
        tol=rtol,
        witness=cond.witness,
        notes=notes,
    )


def corollary_bounds(A: float, B: float, M: float) -> FrameBounds:
    return FrameBounds(float(A * (1 - np.sqrt(M / A)) ** 2), float(B * (1 + np.sqrt(M / B)) ** 2))


def verify_corollary_M(lam: GOperatorFamily, gam: GOperatorFamily, rtol: float = CONTAINMENT_RTOL) -> VerificationReport:
    """Simplified criterion: ``sum ||(Lambda - Gamma) f||^2 <= M ||f||^2`` with ``M < A``."""
    d, s_l, _ = _operators(lam, gam)
    M = max(linalg.lambda_max(d), 0.0)
    base = frame_bounds(lam)
    actual = frame_bounds(gam)
    values = {"M": M, "A": base.lower, "B": base.upper, "actual_lower": actual.lower, "actual_upper": actual.upper}
    if not M < base.lower:
        return VerificationReport("corollary_M", "not_applicable", values=values, tol=rtol,
                                  notes=["M >= A: criterion gives no conclusion"])
    pred = corollary_bounds(base.lower, base.upper, M)
    via_theorem = predicted_bounds(base.lower, base.upper, PerturbationParams(0.0, 0.0, np.sqrt(M)))
    values.update(predicted_lower=pred.lower, predicted_upper=pred.upper)
    lo, hi, ok = _contained(pred, actual, rtol)
    agree = max(abs(pred.lower - via_theorem.lower), abs(pred.upper - via_theorem.upper))
    return VerificationReport(
        "corollary_M",
        "pass" if ok else "fail",
        residuals={"lower_slack": lo, "upper_slack": hi, "theorem_agreement": agree},
        values=values,
        tol=rtol,
    )


@dataclass
class ProbeResult:
    lam: GOperatorFamily
    gam: GOperatorFamily
    params: PerturbationParams
    witness: np.ndarray
    gate: bool
    gamma_lambda_min: float
    condition: ConditionResult


def remark_counterexample_probe(n: int, seed: int | None = None) -> ProbeResult:
    """A pair satisfying the condition while ``Gamma`` is not a frame.

    ``Lambda`` is Parseval (the identity when ``seed`` is None, otherwise a
    seeded random Parseval family) and ``Gamma = Lambda (I - v v^*)`` kills
    the unit direction ``v``.  Then ``||(Lambda - Gamma) f|| = |<f, v>| <=
    ||Lambda f||``, so the condition holds with ``l1 = 1``, which breaks the
    gate.
    """
    if n < 2:
        raise ValueError("probe needs n >= 2")
    if seed is None:
        lam = GOperatorFamily.from_blocks([[np.eye(n)]])
        v = np.zeros(n, dtype=complex)
        v[-1] = 1.0
    else:
        lam = random_parseval(seed, n, points=3, indices=2, codim=2)
        v = random_vector(np.random.default_rng([seed, 1]), n)
    proj = np.eye(n) - np.outer(v, v.conj())
    gam = lam.map_blocks(lambda b: b @ proj)
    params = PerturbationParams(1.0, 0.0, 0.0)
    base = frame_bounds(lam)
    return ProbeResult(
        lam,
        gam,
        params,
        v,
        params.gate(base.lower),
        linalg.lambda_min(frame_operator(gam).matrix),
        check_condition(lam, gam, params, seed=seed or 0),
    )
