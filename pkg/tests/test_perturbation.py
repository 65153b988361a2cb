from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import identity_family, single_block
from scgframes import engine, fixtures
from scgframes.errors import DimensionError, GateError
from scgframes.perturbation import (
    Condition,
    PerturbationParams,
    check_condition,
    condition_gap,
    predicted_bounds,
    remark_counterexample_probe,
    verify_corollary_M,
    verify_perturbation_theorem,
)


def bounds_from_proof(A, B, l1, l2, mu):
    """Second implementation: ((1-l1) sqrt A - mu)^2/(1+l2)^2, ((1+l1) sqrt B + mu)^2/(1-l2)^2."""
    lo = ((1 - l1) * np.sqrt(A) - mu) ** 2 / (1 + l2) ** 2
    hi = ((1 + l1) * np.sqrt(B) + mu) ** 2 / (1 - l2) ** 2
    return lo, hi


def scaled_perturbation(fam, seed, ratio):
    """Gamma = Lambda + E with sqrt(lambda_max(D)) = ratio * sqrt(A)."""
    a = engine.frame_bounds(fam).lower
    noise = fixtures.perturb(fam, seed, 1.0) - fam
    d = engine.frame_bounds(noise).upper
    noise = noise.map_blocks(lambda b: b * ratio * np.sqrt(a / d))
    return fam.with_blocks([[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(fam.blocks, noise.blocks)]), a


# predicted bounds --------------------------------------------------------


@pytest.mark.parametrize("A,B", [(1.0, 1.0), (0.3, 7.0)])
def test_zero_params_identity(A, B):
    assert predicted_bounds(A, B, PerturbationParams()).as_tuple() == (A, B)


def test_predicted_unit_half():
    b = predicted_bounds(1.0, 1.0, PerturbationParams(0, 0, 0.5))
    assert b.lower == pytest.approx(0.25, abs=1e-15)
    assert b.upper == pytest.approx(2.25, abs=1e-15)


def test_predicted_asymmetric():
    b = predicted_bounds(1.0, 4.0, PerturbationParams(0.1, 0.1, 0.0))
    # (1 - 0.2/1.1)^2 = 81/121, 4 (1 + 0.2/0.9)^2 = 484/81
    assert b.lower == pytest.approx(float(Fraction(81, 121)), rel=1e-12)
    assert b.upper == pytest.approx(float(Fraction(484, 81)), rel=1e-12)
    assert (b.lower, b.upper) == pytest.approx(bounds_from_proof(1.0, 4.0, 0.1, 0.1, 0.0), rel=1e-12)


def test_gate():
    with pytest.raises(GateError):
        predicted_bounds(1.0, 1.0, PerturbationParams(0.5, 0.0, 0.6))
    with pytest.raises(GateError):
        predicted_bounds(1.0, 1.0, PerturbationParams(0.0, 1.0, 0.0))
    assert not PerturbationParams(0.1).gate(0.0)


params_st = st.tuples(st.floats(0, 0.45), st.floats(0, 0.9), st.floats(0, 0.4))


@settings(max_examples=200, deadline=None)
@given(p=params_st, A=st.floats(0.5, 4), extra=st.floats(0, 5), which=st.integers(0, 2), bump=st.floats(0, 0.05))
def test_predicted_monotone(p, A, extra, which, bump):
    B = A + extra
    base = PerturbationParams(*p)
    q = list(p)
    q[which] += bump
    bigger = PerturbationParams(*q)
    assume(bigger.gate(A))
    b0 = predicted_bounds(A, B, base)
    b1 = predicted_bounds(A, B, bigger)
    assert b1.lower <= b0.lower + 1e-15
    assert b1.upper >= b0.upper - 1e-15


@settings(max_examples=200, deadline=None)
@given(p=params_st, A=st.floats(0.5, 4), extra=st.floats(0, 5))
def test_predicted_matches_proof_form(p, A, extra):
    params = PerturbationParams(*p)
    assume(params.gate(A))
    b = predicted_bounds(A, A + extra, params)
    lo, hi = bounds_from_proof(A, A + extra, *p)
    assert b.lower == pytest.approx(lo, rel=1e-12, abs=1e-15)
    assert b.upper == pytest.approx(hi, rel=1e-12)
    assert b.lower > 0


# condition checking ------------------------------------------------------


def test_condition_identical():
    fam = fixtures.random_frame(0, 3)
    assert check_condition(fam, fam, PerturbationParams()).condition is Condition.CERTIFIED


def test_condition_single_block_eps():
    eps = 0.03
    e = np.array([[0.6, 0.8j], [0, 0]])  # spectral norm 1
    lam = single_block(np.eye(2))
    gam = single_block(np.eye(2) + eps * e)
    res = check_condition(lam, gam, PerturbationParams(0, 0, eps))
    assert res.condition is Condition.CERTIFIED
    # D = eps^2 E*E
    assert res.certificate_lhs == pytest.approx(eps, rel=1e-12)


def test_condition_counterexample():
    res = check_condition(identity_family(), single_block(np.zeros((2, 2))), PerturbationParams(0, 0, 0.5))
    assert res.condition is Condition.COUNTEREXAMPLE
    assert res.max_ratio == pytest.approx(0.5, abs=1e-9)
    assert np.linalg.norm(res.witness) == pytest.approx(1.0)


def test_condition_sampled_only():
    # D = diag(0.09, 0) and S_Gamma = diag(0.49, 0.04) with l2 = 0.45.
    # Pointwise 0.3|f1| <= 0.45 sqrt(0.49|f1|^2 + 0.04|f2|^2) holds (0.45 * 0.7 = 0.315),
    # but the spectral certificate 0.3 <= 0.45 * 0.2 fails.
    lam = single_block(np.diag([1.0, 0.2]))
    gam = single_block(np.diag([0.7, 0.2]))
    res = check_condition(lam, gam, PerturbationParams(0, 0.45, 0), seed=3)
    assert res.condition is Condition.SAMPLED_ONLY
    assert res.max_ratio <= 0
    # with l2 = 0.4 the point e1 violates it: 0.3 > 0.28
    res = check_condition(single_block(np.eye(2)), single_block(np.diag([0.7, 1.0])), PerturbationParams(0, 0.4, 0))
    assert res.condition is Condition.COUNTEREXAMPLE


def test_condition_shape_mismatch():
    with pytest.raises(DimensionError):
        check_condition(identity_family(2), identity_family(3), PerturbationParams())


def test_condition_deterministic():
    lam = single_block(np.diag([1.0, 0.2]))
    gam = single_block(np.diag([0.7, 0.2]))
    p = PerturbationParams(0, 0.45, 0)
    a = check_condition(lam, gam, p, seed=5)
    b = check_condition(lam, gam, p, seed=5)
    assert a.max_ratio == b.max_ratio
    np.testing.assert_array_equal(a.witness, b.witness)


@pytest.mark.parametrize("seed", range(10))
def test_certificate_soundness(seed):
    """Pairs built to satisfy the certificate are never falsified by ascent."""
    fam = fixtures.random_frame(seed, 3, codim=2)
    gam, a = scaled_perturbation(fam, seed + 100, 0.05)
    params = PerturbationParams(0, 0, 0.05 * np.sqrt(a) * 1.001)
    assert check_condition(fam, gam, params).condition is Condition.CERTIFIED
    # brute-force the gap on random unit vectors: never positive
    rng = np.random.default_rng(seed)
    gaps = [condition_gap(fam, gam, params, fixtures.random_vector(rng, 3)) for _ in range(200)]
    assert max(gaps) <= 1e-12


# theorem and corollary ---------------------------------------------------


def test_theorem_identical():
    fam = fixtures.random_frame(1, 3)
    rep = verify_perturbation_theorem(fam, fam, PerturbationParams())
    v = rep.values
    assert rep.passed
    assert v["predicted_lower"] == pytest.approx(v["actual_lower"], rel=1e-12)
    assert v["predicted_upper"] == pytest.approx(v["actual_upper"], rel=1e-12)


def test_theorem_diagonal_hand_case():
    lam = identity_family()
    gam = single_block(np.diag([0.9, 1.1]))
    rep = verify_perturbation_theorem(lam, gam, PerturbationParams(0, 0, 0.1))
    v = rep.values
    assert v["condition"] == "CertifiedSufficient"
    for key, want in [("predicted_lower", 0.81), ("actual_lower", 0.81), ("predicted_upper", 1.21), ("actual_upper", 1.21)]:
        assert v[key] == pytest.approx(want, abs=1e-12)
    assert rep.passed


@pytest.mark.parametrize("seed", range(50))
def test_theorem_random_containment(seed):
    fam = fixtures.random_frame(seed, 3, codim=2)
    gam, a = scaled_perturbation(fam, seed + 1000, 0.05)
    rep = verify_perturbation_theorem(fam, gam, PerturbationParams(0, 0, 0.05 * np.sqrt(a)))
    assert rep.values["condition"] == "CertifiedSufficient"
    assert rep.passed, rep.to_dict()


def test_theorem_gate_error():
    with pytest.raises(GateError):
        verify_perturbation_theorem(identity_family(), identity_family(), PerturbationParams(0, 1.2, 0))


def test_theorem_not_applicable_on_counterexample():
    rep = verify_perturbation_theorem(identity_family(), single_block(np.diag([0.0, 1.0])), PerturbationParams(0, 0, 0.5))
    assert rep.status == "not_applicable"


def test_corollary_examples():
    fam = fixtures.random_frame(2, 3)
    rep = verify_corollary_M(fam, fam)
    assert rep.passed and rep.values["M"] == 0.0
    assert rep.values["predicted_lower"] == pytest.approx(rep.values["A"])

    rep = verify_corollary_M(identity_family(), single_block(np.diag([0.9, 1.1])))
    assert rep.status == "pass"
    assert rep.values["M"] == pytest.approx(0.01, abs=1e-15)
    assert rep.values["predicted_lower"] == pytest.approx(0.81, abs=1e-12)
    assert rep.values["predicted_upper"] == pytest.approx(1.21, abs=1e-12)
    assert rep.residuals["theorem_agreement"] <= 1e-15

    rep = verify_corollary_M(identity_family(), single_block(np.diag([0.0, 3.0])))
    assert rep.status == "not_applicable"


# counterexample probe ----------------------------------------------------


def test_probe_canonical_n2():
    pr = remark_counterexample_probe(2)
    np.testing.assert_array_equal(pr.gam.block(0, 0), np.diag([1, 0]))
    assert not pr.gate
    assert pr.gamma_lambda_min <= 1e-12
    assert pr.condition.condition is Condition.CERTIFIED
    # direct check: ||(L - G) f|| = |f2| <= ||f|| = ||L f||
    rng = np.random.default_rng(0)
    for _ in range(100):
        f = fixtures.random_vector(rng, 2, normalize=False)
        assert abs(f[1]) <= np.linalg.norm(f) + 1e-15


@pytest.mark.parametrize("n,seed", [(2, 1), (3, 2), (5, 3)])
def test_probe_seeded(n, seed):
    pr = remark_counterexample_probe(n, seed)
    assert not pr.gate
    assert pr.gamma_lambda_min <= 1e-12
    assert not engine.is_frame(pr.gam)
    assert np.linalg.norm(engine.frame_operator(pr.gam).apply(pr.witness)) <= 1e-12
    rng = np.random.default_rng(seed)
    for _ in range(100):
        f = fixtures.random_vector(rng, n, normalize=False)
        lhs = np.sqrt(sum(w * np.linalg.norm((a - b) @ f) ** 2 for (_, _, w, a), (*_, b) in zip(pr.lam.iter_blocks(), pr.gam.iter_blocks())))
        rhs = np.sqrt(sum(w * np.linalg.norm(a @ f) ** 2 for _, _, w, a in pr.lam.iter_blocks()))
        assert lhs <= rhs * (1 + 1e-12)


def test_probe_rejects_small_n():
    with pytest.raises(ValueError):
        remark_counterexample_probe(1)
