"""Periodization and shift-invariant fiberization on the cyclic group Z_N.

Discrete analog of the Heisenberg-group construction: the unitary DFT
(``norm="ortho"``) plays the role of the group Fourier transform, frequency
cosets play the role of the fibers over ``Pi = [0, 1]``, and a configurable
positive weight profile stands in for the Plancherel density.

Fiber convention for a shift system with lattice step ``p``: the lattice
``p Z_N`` has ``L = N / p`` elements and translating by ``m p`` multiplies
frequency ``xi`` by a character that depends only on ``xi mod L``.  The
fibers are therefore the ``L`` cosets ``{sigma + t L : t = 0..p-1}``, and
each carries measure ``1 / L`` (a uniform grid on ``Pi``) once the fiber
vectors are scaled by ``sqrt(L)``.  :func:`fiber_decomposition` returns the
unscaled DFT samples, so the plain sum of fiber energies equals ``||f||^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .core import DiscreteMeasureSpace, GOperatorFamily, IndexSet
from .errors import ConfigError, DimensionError
from .reports import CheckName, IdentityCheck, VerificationReport

WeightProfile = Callable[[np.ndarray], np.ndarray]


def dft(x) -> np.ndarray:
    return np.fft.fft(np.asarray(x, dtype=complex), norm="ortho")


def idft(x) -> np.ndarray:
    return np.fft.ifft(np.asarray(x, dtype=complex), norm="ortho")


def dft_matrix(n: int) -> np.ndarray:
    return dft(np.eye(n)).T


def flat_profile(k: np.ndarray) -> np.ndarray:
    return np.ones_like(k, dtype=float)


def plancherel_profile(k: np.ndarray) -> np.ndarray:
    """``|k| + 1/2``: positive stand-in for the density ``|lambda|``."""
    return np.abs(k).astype(float) + 0.5


@dataclass(frozen=True)
class PeriodizationGrid:
    n: int
    fibers: int
    weight_profile: WeightProfile = flat_profile

    def __post_init__(self):
        if self.n < 1 or self.fibers < 1 or self.n % self.fibers:
            raise ConfigError(f"fiber count {self.fibers} must divide N={self.n}")

    @property
    def offsets_per_fiber(self) -> int:
        return self.n // self.fibers

    def frequency(self, sigma: int, j: int) -> int:
        return sigma + j * self.fibers


def periodization_family(n: int, m: int, weight_profile: WeightProfile = flat_profile) -> GOperatorFamily:
    """Parseval family ``Lambda_{sigma, j} f = c_{sigma,j} fhat(sigma + j m)``.

    Points ``sigma = 0..m-1`` carry measure ``1/m`` (total mass 1), indices
    ``j = 0..n/m - 1``.  With the weighted transform
    ``F_rho f(k) = fhat(k) / sqrt(rho(k))`` the Plancherel sum reads
    ``||f||^2 = sum_k rho(k) |F_rho f(k)|^2``; periodizing ``k = sigma + j m``
    and absorbing the ``1/m`` measure gives
    ``Lambda_{sigma, j} f = sqrt(m) sqrt(rho(k)) F_rho f(k)``.
    """
    grid = PeriodizationGrid(n, m, weight_profile)
    rho = np.asarray(weight_profile(np.arange(n)), dtype=float)
    if rho.shape != (n,) or np.any(rho <= 0) or not np.all(np.isfinite(rho)):
        raise ConfigError("weight profile must be positive and finite on 0..N-1")
    rows = dft_matrix(n)
    weighted = rows / np.sqrt(rho)[:, None]
    blocks = []
    for sigma in range(m):
        row = []
        for j in range(grid.offsets_per_fiber):
            k = grid.frequency(sigma, j)
            row.append(np.sqrt(m) * np.sqrt(rho[k]) * weighted[k : k + 1])
        blocks.append(row)
    space = DiscreteMeasureSpace(range(m), np.full(m, 1.0 / m))
    return GOperatorFamily(space, IndexSet.range(grid.offsets_per_fiber), n, blocks)


def scale_measure(family: GOperatorFamily, tau: float) -> GOperatorFamily:
    """Multiply every measure weight by ``tau``; bounds scale to ``(tau A, tau B)``."""
    if not tau > 0:
        raise ConfigError(f"measure scale must be positive, got {tau}")
    return family.with_space(family.space.scaled(tau))


@dataclass(frozen=True)
class ShiftSystem:
    """Generators on ``Z_N`` with lattice step ``p`` and extra translates.

    The shift set is ``{k + l : k in extra_shifts, l in p Z_N}``; repeated
    shifts are kept (the system is a family, not a set).
    """

    n: int
    p: int
    generators: tuple
    extra_shifts: tuple = (0,)

    def __init__(self, n: int, p: int, generators: Sequence, extra_shifts: Sequence[int] = (0,)):
        if p < 1 or n % p:
            raise ConfigError(f"lattice step {p} must divide N={n}")
        gens = tuple(np.array(g, dtype=complex).reshape(-1) for g in generators)
        if not gens:
            raise ConfigError("at least one generator required")
        for g in gens:
            if g.shape != (n,):
                raise DimensionError(f"generator of length {g.size}, expected {n}")
            if not np.any(g):
                raise ConfigError("generators must be nonzero")
            g.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "extra_shifts", tuple(int(k) % n for k in extra_shifts) or (0,))

    @property
    def lattice(self) -> np.ndarray:
        return np.arange(0, self.n, self.p)

    @property
    def n_fibers(self) -> int:
        return self.n // self.p

    def shifts(self) -> list[int]:
        return [(k + l) % self.n for k in self.extra_shifts for l in self.lattice]

    def translate(self, phi, gamma: int) -> np.ndarray:
        """``L_gamma phi(w) = phi(w - gamma)``."""
        return np.roll(np.asarray(phi), gamma)

    def elements(self) -> np.ndarray:
        """All ``L_gamma phi`` as rows, ordered generator-major."""
        return np.array([self.translate(phi, g) for phi in self.generators for g in self.shifts()])

    def to_dict(self) -> dict:
        from .core import encode_matrix

        return {
            "N": self.n,
            "p": self.p,
            "generators": [encode_matrix(g) for g in self.generators],
            "extra_shifts": list(self.extra_shifts),
        }


def _signal(system: ShiftSystem, f) -> np.ndarray:
    f = np.asarray(f, dtype=complex).reshape(-1)
    if f.shape != (system.n,):
        raise DimensionError(f"signal of length {f.size}, expected {system.n}")
    return f


def shift_analysis_coefficients(system: ShiftSystem, f) -> np.ndarray:
    """Table ``c[phi, gamma] = <f, L_gamma phi>`` (linear in ``f``).

    Rows follow ``system.generators``; columns follow ``system.shifts()``.
    Computed as circular cross-correlations via the DFT.
    """
    f = _signal(system, f)
    fh = np.fft.fft(f)
    shifts = system.shifts()
    out = np.empty((len(system.generators), len(shifts)), dtype=complex)
    for r, phi in enumerate(system.generators):
        # corr[g] = sum_w f(w) conj(phi(w - g))
        corr = np.fft.ifft(fh * np.conj(np.fft.fft(phi)))
        out[r] = corr[shifts]
    return out


def fiber_cosets(system: ShiftSystem) -> list[np.ndarray]:
    step = system.n_fibers
    return [sigma + step * np.arange(system.p) for sigma in range(step)]


def fiber_decomposition(system: ShiftSystem, f) -> list[np.ndarray]:
    """Unitary-DFT samples of ``f`` on each fiber coset."""
    fh = dft(_signal(system, f))
    return [fh[c] for c in fiber_cosets(system)]


def fiber_vectors(system: ShiftSystem) -> list[np.ndarray]:
    """Per fiber, rows ``T(L_k phi)(sigma)`` for generators and extra shifts."""
    rows = [dft(system.translate(phi, k)) for phi in system.generators for k in system.extra_shifts]
    rows = np.array(rows)
    return [rows[:, c] for c in fiber_cosets(system)]


def verify_fiber_norm_identity(system: ShiftSystem, f, tol: float = 1e-10) -> IdentityCheck:
    """``sum |<f, L_gamma phi>|^2`` against the fiber integral.

    The right side is ``sum_sigma (1/L) sum_{phi,k} |<sqrt(L) Tf(sigma),
    sqrt(L) T(L_k phi)(sigma)>|^2 = L sum_sigma sum |<Tf, T L_k phi>|^2``.
    """
    f = _signal(system, f)
    lhs = float(np.sum(np.abs(shift_analysis_coefficients(system, f)) ** 2))
    fibers = fiber_decomposition(system, f)
    vecs = fiber_vectors(system)
    L = system.n_fibers
    rhs = float(L * sum(np.sum(np.abs(v.conj() @ tf) ** 2) for tf, v in zip(fibers, vecs)))
    energy = sum(float(np.vdot(g, g).real) for g in system.generators) * len(system.extra_shifts)
    scale = max(float(np.vdot(f, f).real) * max(1.0, energy), np.finfo(float).tiny)
    return IdentityCheck(CheckName.FIBER_NORM_IDENTITY, lhs, rhs, tol * scale, witness={"f_norm": float(np.linalg.norm(f))})


def _span_bounds(evals: np.ndarray, rtol: float = 1e-10):
    """Extremal nonzero eigenvalues, or None if the spectrum is numerically zero."""
    top = float(np.max(evals)) if evals.size else 0.0
    nz = evals[evals > rtol * max(top, 1.0)] if top > 0 else evals[:0]
    if nz.size == 0:
        return None
    return float(nz.min()), float(nz.max())


def fiber_bounds(system: ShiftSystem) -> list[tuple[float, float] | None]:
    """Frame bounds of each fiber family on its own span (``None`` if empty)."""
    L = system.n_fibers
    out = []
    for v in fiber_vectors(system):
        s = L * (v.T @ v.conj())
        out.append(_span_bounds(linalg.eigh(s)[0]))
    return out


def global_bounds(system: ShiftSystem) -> tuple[float, float] | None:
    """Frame bounds of ``{L_gamma phi}`` on its span, from the frame operator."""
    e = system.elements()
    s = e.T @ e.conj()
    return _span_bounds(linalg.eigh(s)[0])


def gram_bounds(system: ShiftSystem) -> tuple[float, float] | None:
    """Same quantity via the Gram matrix ``G[a, b] = <e_b, e_a>``."""
    e = system.elements()
    g = e.conj() @ e.T
    return _span_bounds(linalg.eigh(g)[0])


def verify_fiber_frame_theorem(system: ShiftSystem, rtol: float = 1e-9) -> VerificationReport:
    """Global bounds must lie in the envelope ``[min A_sigma, max B_sigma]``."""
    per_fiber = fiber_bounds(system)
    live = [b for b in per_fiber if b is not None]
    glob = global_bounds(system)
    gram = gram_bounds(system)
    table = [None if b is None else {"lower": b[0], "upper": b[1]} for b in per_fiber]
    values = {"fiber_bounds": table, "global": glob, "gram": gram}
    if glob is None or not live:
        return VerificationReport("fiber_frame_theorem", "not_applicable", values=values, tol=rtol,
                                  notes=["system spans the zero space"])
    env_lo = min(b[0] for b in live)
    env_hi = max(b[1] for b in live)
    values.update(envelope_lower=env_lo, envelope_upper=env_hi)
    lo_slack = (glob[0] - env_lo) / max(1.0, env_lo)
    hi_slack = (env_hi - glob[1]) / max(1.0, env_hi)
    gram_gap = max(abs(glob[0] - gram[0]), abs(glob[1] - gram[1])) / max(1.0, glob[1])
    sharp = max(abs(glob[0] - env_lo), abs(glob[1] - env_hi)) / max(1.0, env_hi)
    ok = lo_slack >= -rtol and hi_slack >= -rtol and gram_gap <= rtol
    return VerificationReport(
        "fiber_frame_theorem",
        "pass" if ok else "fail",
        residuals={"lower_slack": lo_slack, "upper_slack": hi_slack, "gram_gap": gram_gap, "envelope_gap": sharp},
        values=values,
        tol=rtol,
    )


def random_shift_system(seed, n: int, p: int, generators: int = 1, extra_shifts: Sequence[int] = (0,)) -> ShiftSystem:
    rng = np.random.default_rng(seed)
    gens = [(rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2 * n) for _ in range(generators)]
    return ShiftSystem(n, p, gens, extra_shifts)
