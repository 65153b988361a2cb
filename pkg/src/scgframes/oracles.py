"""Deliberately naive reference computations used to cross-check the engine."""

import numpy as np


def naive_frame_operator(family, mask=None) -> np.ndarray:
    """Entry-by-entry accumulation ``S[a, b] = sum_i w_i sum_j sum_r conj(L[r, a]) L[r, b]``."""
    n = family.dim
    s = [[0j] * n for _ in range(n)]
    for i, row in enumerate(family.blocks):
        if mask is not None and not mask.included[i]:
            continue
        w = float(family.weights[i])
        for block in row:
            for r in range(block.shape[0]):
                for a in range(n):
                    ca = complex(block[r, a]).conjugate()
                    for b in range(n):
                        s[a][b] += w * ca * complex(block[r, b])
    return np.array(s, dtype=complex)


def naive_energy(family, f, mask=None) -> float:
    total = 0.0
    for i, row in enumerate(family.blocks):
        if mask is not None and not mask.included[i]:
            continue
        for block in row:
            for r in range(block.shape[0]):
                y = sum(complex(block[r, c]) * complex(f[c]) for c in range(family.dim))
                total += float(family.weights[i]) * abs(y) ** 2
    return total


def naive_shift_coefficients(system, f) -> np.ndarray:
    n = system.n
    out = []
    for phi in system.generators:
        row = []
        for g in system.shifts():
            row.append(sum(complex(f[w]) * complex(phi[(w - g) % n]).conjugate() for w in range(n)))
        out.append(row)
    return np.array(out, dtype=complex)


def extremal_rayleigh(matrix, samples: int, seed) -> tuple[float, float]:
    """Min/max Rayleigh quotients over random vectors (inner approximation of the spectrum)."""
    rng = np.random.default_rng(seed)
    n = matrix.shape[0]
    x = rng.standard_normal((n, samples)) + 1j * rng.standard_normal((n, samples))
    q = np.einsum("ik,ij,jk->k", x.conj(), matrix, x).real / np.sum(np.abs(x) ** 2, axis=0)
    return float(q.min()), float(q.max())
