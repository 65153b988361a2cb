import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import identity_family, single_block
from scgframes import engine, fixtures, identities as ids
from scgframes.core import GOperatorFamily, SubsetMask
from scgframes.errors import NotAFrameError, PreconditionError

GRID = ids.DEFAULT_LAMBDA_GRID


def _psd_power(s, power):
    w, v = np.linalg.eigh(s)
    return (v * w**power) @ v.conj().T


def lemma_substitution_oracle(fam, mask, f, lam):
    """Evaluate the canonical-dual identity through P = S^-1/2 S_1 S^-1/2, g = S^1/2 f."""
    s = engine.frame_operator(fam).matrix
    s1 = engine.frame_operator(fam, mask).matrix
    r = _psd_power(s, -0.5)
    p = r @ s1 @ r
    q = np.eye(fam.dim) - p
    g = _psd_power(s, 0.5) @ f
    left = np.linalg.norm(p @ g) ** 2 + 2 * lam * np.vdot(g, q @ g).real
    right = np.linalg.norm(q @ g) ** 2 + 2 * (1 - lam) * np.vdot(g, p @ g).real + (2 * lam - 1) * np.linalg.norm(g) ** 2
    return left, right, (1 - (lam - 1) ** 2) * np.linalg.norm(g) ** 2


# operator lemma -----------------------------------------------------------


def test_lemma_half_split():
    p = q = np.eye(2) / 2
    checks = ids.check_operator_lemma_PQ(p, q, [1.0])
    assert checks[0].passed and checks[0].lhs == 0
    # lambda = 1: 1/4 + 1 >= 1
    assert checks[1].lhs == pytest.approx(1.25) and checks[1].rhs == 1.0 and checks[1].passed


def test_lemma_degenerate_lambda_zero():
    checks = ids.check_operator_lemma_PQ(np.eye(3), np.zeros((3, 3)), [0.0])
    assert checks[1].lhs == pytest.approx(1.0) and checks[1].rhs == 0.0


def test_lemma_random_split():
    rng = np.random.default_rng(11)
    p = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    q = np.eye(3) - p
    checks = ids.check_operator_lemma_PQ(p, q)
    # direct matrix arithmetic for the equality
    ph, qh = p.conj().T, q.conj().T
    assert np.linalg.norm((p - ph @ p) - (qh - qh @ q), 2) <= 1e-12
    assert checks[0].residual <= 1e-12
    assert all(c.passed for c in checks)


def test_lemma_precondition():
    with pytest.raises(PreconditionError):
        ids.check_operator_lemma_PQ(np.eye(2), np.eye(2))


# Parseval identity -------------------------------------------------------


def test_parseval_identity_full_and_empty():
    pf = fixtures.random_parseval(0, 4, points=3)
    f = fixtures.random_vector(1, 4)
    for mask in (SubsetMask.full(3), SubsetMask.empty(3)):
        c = ids.verify_parseval_identity(pf, mask, f)
        assert c.passed
        assert abs(c.lhs) < 1e-12 and abs(c.rhs) < 1e-12


def test_parseval_identity_random():
    pf = fixtures.random_parseval(2, 4, points=4, codim=2)
    rng = np.random.default_rng(3)
    mask = fixtures.random_mask(rng, 4)
    worst = max(ids.verify_parseval_identity(pf, mask, fixtures.random_vector(rng, 4)).residual for _ in range(100))
    assert worst <= 1e-10


def test_parseval_identity_requires_parseval():
    with pytest.raises(PreconditionError):
        ids.verify_parseval_identity(single_block(2 * np.eye(2)), SubsetMask.full(1), [1, 0])


# canonical-dual inequality ----------------------------------------------


def test_canonical_parseval_full_mask_lambda_one():
    pf = fixtures.random_parseval(5, 3)
    f = fixtures.random_vector(6, 3)
    checks = ids.verify_canonical_dual_inequality(pf, SubsetMask.full(3), f, [1.0])
    assert checks[0].passed
    # S_X1 = I: value = ||f||^2 = 1 * E_X(f) + 0
    assert checks[1].slack == pytest.approx(0.0, abs=1e-12)


def test_lambda_half_gives_three_quarters():
    assert ids.lambda_coefficients(0.5) == (0.75, 0.75)
    pf = fixtures.random_parseval(7, 4, points=4)
    rng = np.random.default_rng(8)
    for _ in range(20):
        f = fixtures.random_vector(rng, 4)
        mask = fixtures.random_mask(rng, 4)
        c = ids.verify_canonical_dual_inequality(pf, mask, f, [0.5])[1]
        assert c.rhs == pytest.approx(0.75 * np.vdot(f, f).real, rel=1e-12)
        assert c.passed


def test_coefficients_at_extremes():
    assert ids.lambda_coefficients(1.0) == (1.0, 0.0)
    assert ids.lambda_coefficients(0.0) == (0.0, 1.0)


def test_canonical_against_substitution_oracle():
    fam = fixtures.random_frame(9, 3, points=3, codim=2)
    rng = np.random.default_rng(10)
    for _ in range(50):
        f = fixtures.random_vector(rng, 3)
        mask = fixtures.random_mask(rng, 3)
        checks = ids.verify_canonical_dual_inequality(fam, mask, f, GRID)
        assert checks[0].residual <= 1e-9
        for c in checks[1:]:
            assert c.slack >= -1e-10
            left, right, bound = lemma_substitution_oracle(fam, mask, f, c.lam)
            # oracle equality and inequality hold independently
            assert left == pytest.approx(right, abs=1e-9)
            assert left - bound >= -1e-10


def test_canonical_not_a_frame():
    kernel = GOperatorFamily.from_blocks([[np.array([[0, 1]])]])
    with pytest.raises(NotAFrameError):
        ids.verify_canonical_dual_inequality(kernel, SubsetMask.full(1), [1, 0])


def test_lambda_grid_domain():
    with pytest.raises(PreconditionError):
        ids.verify_canonical_dual_inequality(identity_family(), SubsetMask.full(1), [1, 0], [1.5])


# alternate duals ---------------------------------------------------------


def test_alternate_parseval_self_dual():
    pf = fixtures.random_parseval(12, 3)
    f = fixtures.random_vector(13, 3)
    checks = ids.verify_alternate_dual_inequality(pf, pf, SubsetMask.full(3), f, [1.0])
    assert checks[0].lhs == pytest.approx(1.0) and checks[0].rhs == pytest.approx(1.0)
    assert checks[1].slack == pytest.approx(0.0, abs=1e-12)


def test_alternate_with_canonical_agrees():
    fam = fixtures.random_frame(14, 3, codim=2)
    dual = engine.canonical_dual(fam)
    rng = np.random.default_rng(15)
    for _ in range(10):
        f = fixtures.random_vector(rng, 3)
        mask = fixtures.random_mask(rng, 3)
        alt = ids.verify_alternate_dual_inequality(fam, dual, mask, f)
        can = ids.verify_canonical_dual_inequality(fam, mask, f)
        # same split: F_X1 = S_X1 S^-1, so all passes and equality values agree
        assert all(c.passed for c in alt)
        s_inv = np.linalg.inv(engine.frame_operator(fam).matrix)
        s1 = engine.frame_operator(fam, mask).matrix
        s2 = engine.frame_operator(fam, mask.complement()).matrix
        ip1 = np.vdot(f, s1 @ s_inv @ f).real
        assert alt[0].lhs - alt[0].rhs == pytest.approx(0, abs=1e-9)
        assert can[0].lhs - can[0].rhs == pytest.approx(0, abs=1e-9)
        assert alt[1].rhs == pytest.approx(0 * ip1 + 1 * np.vdot(f, s2 @ s_inv @ f).real, abs=1e-12)


def test_nullspace_alternate_duals():
    rng = np.random.default_rng(16)
    for _ in range(50):
        fam = fixtures.random_frame(rng, 3, points=3, indices=2, codim=2)
        alt = fixtures.alternate_dual(fam, rng)
        assert engine.verify_alternate_dual(fam, alt, 1e-9).passed
        # genuinely different from the canonical dual
        assert max(np.linalg.norm(a - b) for (*_, a), (*_, b) in zip(alt.iter_blocks(), engine.canonical_dual(fam).iter_blocks())) > 1e-3
        f = fixtures.random_vector(rng, 3)
        mask = fixtures.random_mask(rng, 3)
        checks = ids.verify_alternate_dual_inequality(fam, alt, mask, f)
        assert checks[0].residual <= 1e-9
        assert all(c.slack >= -1e-10 for c in checks[1:])


def test_alternate_requires_dual():
    with pytest.raises(PreconditionError):
        ids.verify_alternate_dual_inequality(identity_family(), single_block(2 * np.eye(2)), SubsetMask.full(1), [1, 0])
    with pytest.raises(PreconditionError):
        ids.verify_general_complex_identity(identity_family(), single_block(2 * np.eye(2)), SubsetMask.full(1), [1, 0])


# complex identity --------------------------------------------------------


def test_complex_identity_full_mask():
    pf = fixtures.random_parseval(17, 3)
    f = fixtures.random_vector(18, 3)
    c = ids.verify_general_complex_identity(pf, pf, SubsetMask.full(3), f)
    assert c.passed and c.lhs == pytest.approx(1.0)


def test_complex_identity_real_family():
    fam = fixtures.random_frame(19, 3, real=True)
    alt = engine.canonical_dual(fam)
    f = fixtures.random_vector(20, 3, real=True)
    mask = SubsetMask([True, False, True])
    c = ids.verify_general_complex_identity(fam, alt, mask, f)
    assert abs(c.lhs.imag) < 1e-14 and abs(c.rhs.imag) < 1e-14
    real_eq = ids.verify_alternate_dual_inequality(fam, alt, mask, f, [])[0]
    assert c.lhs.real == pytest.approx(real_eq.lhs, abs=1e-12)


def test_complex_identity_genuinely_complex():
    rng = np.random.default_rng(21)
    fam = fixtures.random_frame(rng, 3, codim=2)
    alt = fixtures.alternate_dual(fam, rng)
    f = fixtures.random_vector(rng, 3)
    mask = SubsetMask([True, False, False])
    c = ids.verify_general_complex_identity(fam, alt, mask, f)
    # direct evaluation from matrices
    f1 = engine.mixed_operator(fam, alt, mask)
    f2 = np.eye(3) - f1
    lhs = np.vdot(f, f2 @ f) + np.linalg.norm(f1 @ f) ** 2
    rhs = np.conj(np.vdot(f, f1 @ f)) + np.linalg.norm(f2 @ f) ** 2
    assert abs(lhs - rhs) <= 1e-10
    assert abs(c.lhs - lhs) <= 1e-12
    assert abs(c.lhs.imag) > 1e-3 and abs(c.rhs.imag) > 1e-3
    assert c.residual <= 1e-10


# parsevalize -------------------------------------------------------------


def test_parsevalize_examples():
    pf = fixtures.random_parseval(22, 3)
    again = ids.parsevalize(pf)
    for (*_, a), (*_, b) in zip(pf.iter_blocks(), again.iter_blocks()):
        np.testing.assert_allclose(a, b, atol=1e-12)
    np.testing.assert_allclose(ids.parsevalize(single_block(2 * np.eye(2))).block(0, 0), np.eye(2), atol=1e-15)
    out = ids.parsevalize(fixtures.random_frame(23, 4, codim=2))
    s = engine.frame_operator(out).matrix
    assert np.linalg.norm(s - np.eye(4), 2) <= 1e-9


def test_parsevalize_not_a_frame():
    with pytest.raises(NotAFrameError):
        ids.parsevalize(GOperatorFamily.from_blocks([[np.array([[0, 1]])]]))


# property suites ---------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=50, deadline=None)
@given(seed=seeds)
def test_lemma_inequality_on_parseval_splits(seed):
    rng = np.random.default_rng(seed)
    pf = fixtures.random_parseval(rng, 4, points=4, codim=2)
    mask = fixtures.random_mask(rng, 4)
    p = engine.frame_operator(pf, mask).matrix
    checks = ids.check_operator_lemma_PQ(p, np.eye(4) - p)
    assert all(c.passed for c in checks)
    assert min(c.slack for c in checks[1:]) >= -1e-10


@settings(max_examples=50, deadline=None)
@given(seed=seeds)
def test_complex_real_part_consistency(seed):
    rng = np.random.default_rng(seed)
    fam = fixtures.random_frame(rng, 3, codim=2)
    alt = fixtures.alternate_dual(fam, rng)
    f = fixtures.random_vector(rng, 3)
    mask = fixtures.random_mask(rng, 3)
    c = ids.verify_general_complex_identity(fam, alt, mask, f)
    r = ids.verify_alternate_dual_inequality(fam, alt, mask, f, [])[0]
    assert abs(c.lhs.real - r.lhs) <= 1e-12
    assert abs(c.rhs.real - r.rhs) <= 1e-12
