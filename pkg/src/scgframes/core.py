"""Finite-dimensional data model for semi-continuous g-frames.

The measure space ``(X, mu)`` is a finite set of points carrying positive
weights, so every integral over ``X`` is a weighted sum.  A family assigns
to each pair ``(x_i, j)`` a complex matrix ``Lambda_{i,j}`` of shape
``d_{i,j} x n`` acting on ``H = C^n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable, Sequence

import numpy as np

from .errors import DimensionError

__all__ = [
    "DEFAULT_RTOL",
    "DiscreteMeasureSpace",
    "IndexSet",
    "GOperatorFamily",
    "SubsetMask",
    "FrameBounds",
    "Violation",
    "analysis_energy",
    "validate_family",
    "default_tolerance",
    "family_from_dict",
    "family_to_dict",
    "encode_matrix",
    "decode_matrix",
]

DEFAULT_RTOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DiscreteMeasureSpace:
    """Weighted point set standing in for ``(X, mu)``."""

    points: tuple
    weights: np.ndarray

    def __init__(self, points: Sequence[Hashable], weights: Sequence[float]):
        w = np.array(weights, dtype=float).reshape(-1)
        pts = tuple(points)
        if len(pts) != w.size:
            raise DimensionError(f"{len(pts)} points but {w.size} weights")
        if w.size < 1:
            raise ValueError("measure space needs at least one point")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("measure weights must be finite and positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "_total", float(np.sum(w)))

    @classmethod
    def uniform(cls, m: int, mass: float = 1.0) -> "DiscreteMeasureSpace":
        return cls(range(m), np.full(m, mass / m))

    @classmethod
    def counting(cls, m: int) -> "DiscreteMeasureSpace":
        return cls(range(m), np.ones(m))

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def total_mass(self) -> float:
        return self._total

    def scaled(self, factor: float) -> "DiscreteMeasureSpace":
        return DiscreteMeasureSpace(self.points, self.weights * factor)

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasureSpace):
            return NotImplemented
        return self.points == other.points and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.points, self.weights.tobytes()))


@dataclass(frozen=True)
class IndexSet:
    """Finite truncation of the countable index set ``J``."""

    labels: tuple

    def __init__(self, labels: Sequence[Hashable]):
        labels = tuple(labels)
        if len(labels) < 1:
            raise ValueError("index set must be non-empty")
        if len(set(labels)) != len(labels):
            raise ValueError("index labels must be distinct")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def range(cls, size: int) -> "IndexSet":
        return cls(range(size))

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class SubsetMask:
    """Boolean selection of measure-space points (``X_1`` inside ``X``)."""

    included: np.ndarray

    def __init__(self, included: Sequence[bool]):
        a = np.array(included, dtype=bool).reshape(-1)
        object.__setattr__(self, "included", _frozen(a))

    @classmethod
    def full(cls, m: int) -> "SubsetMask":
        return cls(np.ones(m, dtype=bool))

    @classmethod
    def empty(cls, m: int) -> "SubsetMask":
        return cls(np.zeros(m, dtype=bool))

    @classmethod
    def from_indices(cls, m: int, indices) -> "SubsetMask":
        a = np.zeros(m, dtype=bool)
        a[list(indices)] = True
        return cls(a)

    def complement(self) -> "SubsetMask":
        return SubsetMask(~self.included)

    def __len__(self) -> int:
        return self.included.size

    def __eq__(self, other):
        if not isinstance(other, SubsetMask):
            return NotImplemented
        return np.array_equal(self.included, other.included)

    def __hash__(self):
        return hash(self.included.tobytes())


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower < 0 or self.upper < self.lower:
            raise ValueError(f"invalid frame bounds ({self.lower}, {self.upper})")

    @property
    def is_frame(self) -> bool:
        return self.lower > 0

    def as_tuple(self) -> tuple[float, float]:
        return (self.lower, self.upper)


@dataclass(frozen=True)
class GOperatorFamily:
    """Indexed family ``{Lambda_{x_i, j}}`` of operators ``C^n -> C^{d_ij}``.

    ``blocks[i][j]`` is the matrix attached to point ``i`` and index ``j``.
    Construction does not reject malformed blocks so that
    :func:`validate_family` can report them; every numerical operation
    calls :meth:`require_valid` first.
    """

    space: DiscreteMeasureSpace
    index_set: IndexSet
    dim: int
    blocks: tuple

    def __init__(self, space, index_set, dim, blocks):
        rows = []
        for row in blocks:
            rows.append(tuple(_frozen(np.array(b, dtype=complex, ndmin=2)) for b in row))
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "index_set", index_set)
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "blocks", tuple(rows))

    @classmethod
    def from_blocks(cls, blocks, weights=None, dim=None) -> "GOperatorFamily":
        """Build a family from a nested ``[point][index]`` list of matrices."""
        blocks = [list(row) for row in blocks]
        m = len(blocks)
        if weights is None:
            weights = np.ones(m)
        if dim is None:
            dim = np.array(blocks[0][0], ndmin=2).shape[1]
        return cls(
            DiscreteMeasureSpace(range(m), weights),
            IndexSet.range(len(blocks[0])),
            dim,
            blocks,
        )

    @property
    def n_points(self) -> int:
        return self.space.size

    @property
    def n_indices(self) -> int:
        return self.index_set.size

    @property
    def weights(self) -> np.ndarray:
        return self.space.weights

    def block(self, i: int, j: int) -> np.ndarray:
        return self.blocks[i][j]

    def codims(self) -> np.ndarray:
        return np.array([[b.shape[0] for b in row] for row in self.blocks])

    def iter_blocks(self):
        """Yield ``(i, j, weight, block)`` for every pair."""
        for i, row in enumerate(self.blocks):
            w = self.space.weights[i]
            for j, b in enumerate(row):
                yield i, j, w, b

    def with_blocks(self, blocks) -> "GOperatorFamily":
        return GOperatorFamily(self.space, self.index_set, self.dim, blocks)

    def map_blocks(self, fn) -> "GOperatorFamily":
        return self.with_blocks([[fn(b) for b in row] for row in self.blocks])

    def with_space(self, space: DiscreteMeasureSpace) -> "GOperatorFamily":
        return GOperatorFamily(space, self.index_set, self.dim, self.blocks)

    def same_shape(self, other: "GOperatorFamily") -> bool:
        return (
            self.dim == other.dim
            and self.n_points == other.n_points
            and self.n_indices == other.n_indices
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.codims(), other.codims())
        )

    def require_valid(self) -> None:
        violations = validate_family(self)
        if violations:
            raise DimensionError("; ".join(v.message for v in violations))

    def stacked(self, mask: SubsetMask | None = None):
        """Return ``(analysis matrix, row weights)`` over the selected points."""
        mats, ws = [], []
        for i, j, w, b in self.iter_blocks():
            if mask is not None and not mask.included[i]:
                continue
            mats.append(b)
            ws.append(np.full(b.shape[0], w))
        if not mats:
            return np.zeros((0, self.dim), dtype=complex), np.zeros(0)
        return np.vstack(mats), np.concatenate(ws)

    def max_block_norm(self) -> float:
        return max(np.linalg.norm(b, 2) for _, _, _, b in self.iter_blocks())

    def __sub__(self, other: "GOperatorFamily") -> "GOperatorFamily":
        if not self.same_shape(other):
            raise DimensionError("families differ in space, index set or block shapes")
        return self.with_blocks(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.blocks, other.blocks)]
        )

    def __eq__(self, other):
        if not isinstance(other, GOperatorFamily):
            return NotImplemented
        return (
            self.space == other.space
            and self.index_set == other.index_set
            and self.dim == other.dim
            and len(self.blocks) == len(other.blocks)
            and all(
                len(ra) == len(rb) and all(np.array_equal(a, b) for a, b in zip(ra, rb))
                for ra, rb in zip(self.blocks, other.blocks)
            )
        )

    __hash__ = None


@dataclass(frozen=True)
class Violation:
    kind: str
    location: tuple
    message: str


def validate_family(family: GOperatorFamily) -> list[Violation]:
    """List every broken invariant of ``family``; an empty list means valid."""
    out: list[Violation] = []
    if family.dim < 1:
        out.append(Violation("DimensionMismatch", (), f"dim must be >= 1, got {family.dim}"))
    if len(family.blocks) != family.n_points:
        out.append(
            Violation(
                "MissingBlock",
                (),
                f"{len(family.blocks)} block rows for {family.n_points} points",
            )
        )
    for i, row in enumerate(family.blocks):
        if len(row) != family.n_indices:
            out.append(
                Violation("MissingBlock", (i,), f"point {i}: {len(row)} blocks for {family.n_indices} indices")
            )
        for j, b in enumerate(row):
            if b.ndim != 2 or b.shape[1] != family.dim:
                out.append(
                    Violation(
                        "DimensionMismatch",
                        (i, j),
                        f"block ({i}, {j}) has shape {b.shape}, expected (d, {family.dim})",
                    )
                )
            elif b.shape[0] < 1:
                out.append(Violation("DimensionMismatch", (i, j), f"block ({i}, {j}) has empty codomain"))
            if not np.all(np.isfinite(b)):
                out.append(Violation("NonFiniteEntry", (i, j), f"block ({i}, {j}) has NaN or Inf entries"))
    return out


def _check_vector(family: GOperatorFamily, f) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.shape != (family.dim,):
        raise DimensionError(f"vector of shape {f.shape}, expected ({family.dim},)")
    return f


def _check_mask(family: GOperatorFamily, mask: SubsetMask | None) -> SubsetMask:
    if mask is None:
        return SubsetMask.full(family.n_points)
    if len(mask) != family.n_points:
        raise DimensionError(f"mask of length {len(mask)} for {family.n_points} points")
    return mask


def analysis_energy(family: GOperatorFamily, f, mask: SubsetMask | None = None) -> float:
    """Weighted analysis energy ``sum_{i in mask} w_i sum_j ||Lambda_{i,j} f||^2``.

    Evaluated block by block from the raw operators, independently of the
    frame operator.
    """
    family.require_valid()
    f = _check_vector(family, f)
    mask = _check_mask(family, mask)
    terms = [
        w * np.vdot(y, y).real
        for i, _, w, b in family.iter_blocks()
        if mask.included[i]
        for y in (b @ f,)
    ]
    return float(np.sum(terms)) if terms else 0.0


def default_tolerance(family: GOperatorFamily, rtol: float = DEFAULT_RTOL) -> float:
    """Absolute tolerance ``rtol`` scaled by the largest block norm."""
    return rtol * max(1.0, family.max_block_norm())


# -- JSON encoding ---------------------------------------------------------


def encode_matrix(a) -> list:
    """Row-major nested list with complex entries as ``[re, im]``."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [encode_matrix(row) for row in a]


def decode_matrix(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.shape[-1] != 2:
        raise DimensionError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def family_to_dict(family: GOperatorFamily) -> dict[str, Any]:
    return {
        "dim": family.dim,
        "points": list(family.space.points),
        "weights": [float(w) for w in family.weights],
        "indices": list(family.index_set.labels),
        "blocks": [[encode_matrix(b) for b in row] for row in family.blocks],
    }


def family_from_dict(data: dict[str, Any]) -> GOperatorFamily:
    space = DiscreteMeasureSpace(data.get("points", range(len(data["weights"]))), data["weights"])
    n_idx = len(data["blocks"][0]) if data["blocks"] else 1
    index_set = IndexSet(data.get("indices", range(n_idx)))
    blocks = [[decode_matrix(b) for b in row] for row in data["blocks"]]
    return GOperatorFamily(space, index_set, data["dim"], blocks)
