"""Hermitian spectral helpers (inverse, square roots) via ``eigh``."""

import numpy as np

from .errors import NotAFrameError, NumericalError

RANK_RTOL = 1e-12


def hermitian_part(a):
    a = np.asarray(a)
    return 0.5 * (a + a.conj().T)


def eigh(a):
    try:
        return np.linalg.eigh(hermitian_part(a))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver failed: {exc}") from exc


def rank_threshold(evals, rtol=RANK_RTOL):
    """Eigenvalues at or below this are treated as zero."""
    return rtol * max(float(np.max(np.abs(evals))), 0.0) if len(evals) else 0.0


def _spectral(a, fn, rtol, name):
    evals, vecs = eigh(a)
    thresh = rank_threshold(evals, rtol)
    if evals[0] <= thresh:
        raise NotAFrameError(
            f"cannot form {name}: smallest eigenvalue {evals[0]:.3e} <= threshold {thresh:.3e}"
        )
    return (vecs * fn(evals)) @ vecs.conj().T


def inv_psd(a, rtol=RANK_RTOL):
    """Inverse of a Hermitian positive definite matrix."""
    return _spectral(a, lambda e: 1.0 / e, rtol, "inverse")


def sqrt_psd(a, rtol=RANK_RTOL):
    """Square root of a Hermitian PSD matrix; eigenvalues clamped at the rank threshold."""
    evals, vecs = eigh(a)
    evals = np.where(evals > rank_threshold(evals, rtol), evals, 0.0)
    return (vecs * np.sqrt(evals)) @ vecs.conj().T


def invsqrt_psd(a, rtol=RANK_RTOL):
    return _spectral(a, lambda e: 1.0 / np.sqrt(e), rtol, "inverse square root")


def lambda_min(a) -> float:
    return float(eigh(a)[0][0])


def lambda_max(a) -> float:
    return float(eigh(a)[0][-1])
