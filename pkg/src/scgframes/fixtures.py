"""Seeded generators for test and experiment families.

All randomness goes through ``numpy.random.default_rng(seed)`` so a seed
fully determines the output.
"""

from __future__ import annotations

import numpy as np

from .core import DiscreteMeasureSpace, GOperatorFamily, IndexSet, SubsetMask
from .engine import DualFamily, canonical_dual
from .errors import NotAFrameError
from .identities import parsevalize


def rng_for(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def complex_gaussian(rng, shape, real: bool = False) -> np.ndarray:
    z = rng.standard_normal(shape)
    if real:
        return z.astype(complex)
    return (z + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_family(
    seed,
    dim: int,
    points: int = 3,
    indices: int = 2,
    codim=1,
    real: bool = False,
    weights=None,
) -> GOperatorFamily:
    """Gaussian blocks with random positive weights.

    ``codim`` is either an int or a callable ``rng -> int`` drawn per block.
    """
    rng = rng_for(seed)
    if weights is None:
        weights = rng.uniform(0.25, 2.0, size=points)
    blocks = []
    for _ in range(points):
        row = []
        for _ in range(indices):
            d = codim(rng) if callable(codim) else codim
            row.append(complex_gaussian(rng, (d, dim), real))
        blocks.append(row)
    return GOperatorFamily(DiscreteMeasureSpace(range(points), weights), IndexSet.range(indices), dim, blocks)


def random_frame(
    seed, dim: int, points: int = 3, indices: int = 2, codim=1, real=False, max_tries: int = 100
) -> GOperatorFamily:
    """Like :func:`random_family` but redraws until the family is a frame with
    a sensible condition number (``B / A < 1e6``)."""
    from .engine import frame_bounds

    if not callable(codim) and points * indices * codim < dim:
        raise NotAFrameError(f"{points * indices * codim} rows cannot span dimension {dim}")
    rng = rng_for(seed)
    for _ in range(max_tries):
        fam = random_family(rng, dim, points, indices, codim, real)
        a, b = frame_bounds(fam).as_tuple()
        if a > 0 and b / a < 1e6:
            return fam
    raise NotAFrameError(f"no well-conditioned frame after {max_tries} draws")


def random_parseval(seed, dim: int, points: int = 3, indices: int = 2, codim=1, real=False) -> GOperatorFamily:
    return parsevalize(random_frame(seed, dim, points, indices, codim, real))


def alternate_dual(family: GOperatorFamily, seed, scale: float = 1.0) -> DualFamily:
    """Canonical dual plus a synthesis-orthogonal perturbation ``N``.

    Stacking the blocks into ``A`` (rows) with row weights ``w``, the
    perturbation columns are projected onto the orthogonal complement of
    ``range(diag(w) A)`` so that ``A^* diag(w) N = 0``; hence
    ``sum w Lambda^* (dual + N) = I``.
    """
    rng = rng_for(seed)
    canon = canonical_dual(family)
    a, w = family.stacked()
    b = w[:, None] * a
    z = complex_gaussian(rng, a.shape)
    q, _ = np.linalg.qr(b)
    n_stack = scale * (z - q @ (q.conj().T @ z))
    out, row = [], 0
    for blocks in canon.blocks:
        new_row = []
        for blk in blocks:
            d = blk.shape[0]
            new_row.append(blk + n_stack[row : row + d])
            row += d
        out.append(new_row)
    return DualFamily(family.with_blocks(out), "alternate")


def random_mask(seed, m: int) -> SubsetMask:
    return SubsetMask(rng_for(seed).random(m) < 0.5)


def random_vector(seed, dim: int, real: bool = False, normalize: bool = True) -> np.ndarray:
    v = complex_gaussian(rng_for(seed), dim, real)
    if normalize:
        v = v / np.linalg.norm(v)
    return v


def perturb(family: GOperatorFamily, seed, scale: float) -> GOperatorFamily:
    """Add i.i.d. complex Gaussian noise times ``scale`` to every block."""
    rng = rng_for(seed)
    return family.map_blocks(lambda b: b + scale * complex_gaussian(rng, b.shape))
