"""System containers: ordered tuples of linear maps with cached norms and
validity flags, probability vectors, and the named benchmark pairs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_matrix, diagonal, rotation, singular_values

__all__ = [
    "MatrixSystem",
    "ProbabilityVector",
    "diagonal_pair",
    "rotated_pair",
    "conformal_system",
    "matrices_to_json",
    "matrices_from_json",
    "validate_word",
]

#: maps with smallest singular value at or below this are rejected as
#: non-invertible
MIN_SINGULAR = 1e-14


@dataclass(frozen=True)
class MatrixSystem:
    """Ordered tuple (A_1, ..., A_N) of invertible maps of one dimension.

    Cached per-map norms and smallest singular values feed the enumeration
    pruning rules; the contraction flags gate the pressure operations.
    """

    maps: tuple[np.ndarray, ...]
    dim: int
    norms: tuple[float, ...]
    min_singular: tuple[float, ...]
    contracting: bool        # max ||A_i|| < 1
    strongly_contracting: bool  # max ||A_i|| < 1/2
    nonnegative: bool        # all entries >= 0 (enables diagonal-entry minorants)

    @classmethod
    def from_matrices(cls, mats) -> "MatrixSystem":
        arrays = tuple(as_matrix(m) for m in mats)
        if len(arrays) < 1:
            raise ValueError("a system needs at least one map")
        dim = arrays[0].shape[0]
        if any(a.shape[0] != dim for a in arrays):
            raise ValueError("all maps must share one dimension")
        norms = []
        min_sv = []
        for a in arrays:
            sv = singular_values(a)
            if sv[-1] <= MIN_SINGULAR:
                raise ValueError(
                    f"map is numerically singular (smallest singular value "
                    f"{sv[-1]:.3e} <= {MIN_SINGULAR:.0e})"
                )
            norms.append(float(sv[0]))
            min_sv.append(float(sv[-1]))
        for a in arrays:
            a.setflags(write=False)
        top = max(norms)
        return cls(
            maps=arrays,
            dim=dim,
            norms=tuple(norms),
            min_singular=tuple(min_sv),
            contracting=top < 1.0,
            strongly_contracting=top < 0.5,
            nonnegative=all(np.all(a >= 0.0) for a in arrays),
        )

    def __len__(self) -> int:
        return len(self.maps)

    def flat2(self) -> list[tuple[float, float, float, float]]:
        """Row-major 2x2 entries for the kernel backends."""
        if self.dim != 2:
            raise ValueError("flat2 requires dimension 2")
        return [(float(a[0, 0]), float(a[0, 1]), float(a[1, 0]), float(a[1, 1]))
                for a in self.maps]


@dataclass(frozen=True)
class ProbabilityVector:
    """Strictly positive weights summing to 1."""

    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) < 1:
            raise ValueError("empty probability vector")
        if any(w <= 0.0 for w in self.weights):
            raise ValueError("all probabilities must be positive")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")

    @classmethod
    def two_point(cls, p: float) -> "ProbabilityVector":
        """(p, 1 - p) for p in (0, 1)."""
        if not 0.0 < p < 1.0:
            raise ValueError("p must lie in (0, 1)")
        return cls((float(p), 1.0 - float(p)))

    @classmethod
    def uniform(cls, n: int) -> "ProbabilityVector":
        return cls(tuple([1.0 / n] * n))

    def __len__(self) -> int:
        return len(self.weights)


def diagonal_pair(lam: float, delta: float) -> MatrixSystem:
    """The commuting benchmark pair (diag(lam, delta), diag(lam, lam)).

    Every length-n product has operator norm lam^n, which makes the
    q-pressure exactly computable and the pair a reference point for the
    discontinuity experiment.
    """
    _check_lam_delta(lam, delta)
    return MatrixSystem.from_matrices([diagonal(lam, delta), diagonal(lam, lam)])


def rotated_pair(lam: float, delta: float, k: int) -> MatrixSystem:
    """The perturbed pair (diag(lam, delta), lam * rotation(pi / (2k))).

    The k-th power of the second map is exactly lam^k times a quarter turn,
    so words of the form 1^n 2^k 1^n collapse in norm; increasing k moves
    the pair toward the commuting pair while the collapse persists.
    """
    _check_lam_delta(lam, delta)
    if k < 1:
        raise ValueError("k must be a positive integer")
    return MatrixSystem.from_matrices(
        [diagonal(lam, delta), lam * rotation(math.pi / (2.0 * k))]
    )


def conformal_system(ratios, thetas=None) -> MatrixSystem:
    """Maps ratio_i * rotation(theta_i); singular values are (r_i, r_i)."""
    ratios = [float(r) for r in ratios]
    if thetas is None:
        thetas = [0.0] * len(ratios)
    if len(thetas) != len(ratios):
        raise ValueError("need one angle per ratio")
    return MatrixSystem.from_matrices(
        [r * rotation(t) for r, t in zip(ratios, thetas)]
    )


def _check_lam_delta(lam: float, delta: float) -> None:
    if not 0.0 < delta < lam < 0.5:
        raise ValueError("require 0 < delta < lam < 1/2")


def validate_word(word, n_maps: int) -> tuple[int, ...]:
    """Letters are 1-based indices into the system's maps."""
    letters = tuple(int(i) for i in word)
    if len(letters) < 1:
        raise ValueError("empty word")
    if any(i < 1 or i > n_maps for i in letters):
        raise ValueError(f"letters must lie in 1..{n_maps}")
    return letters


def matrices_to_json(mats) -> str:
    """Serialize matrices as row-major arrays of arrays of numbers."""
    payload = [[list(map(float, row)) for row in as_matrix(m)] for m in mats]
    return json.dumps(payload)


def matrices_from_json(text: str) -> list[np.ndarray]:
    data = json.loads(text)
    if isinstance(data, list) and data and isinstance(data[0][0], (int, float)):
        data = [data]  # a single matrix
    return [as_matrix(m) for m in data]
