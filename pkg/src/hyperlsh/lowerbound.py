"""Checks for the Hamming-cube embedding behind the hyperbolic LSH lower bound.

Cube points ``x`` in {0,1}^d are placed at a common height ``z`` of the
half-space model of H^(d+1).  For ``z >= sqrt(d / (2 eps))`` the scaled
distance ``z * d_H`` lies between ``sqrt(ham) (1 - eps/12)`` and
``sqrt(ham)``, where ``ham`` is the Hamming distance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .geometry import DomainError, distance_halfspace, stable_arccosh1p

SANDWICH_SLACK = 1e-12


@dataclass(frozen=True)
class HammingEmbedding:
    d: int
    z: float
    epsilon: float

    def __post_init__(self) -> None:
        if self.d < 1:
            raise DomainError("cube dimension must be positive")
        if not 0 < self.epsilon < 1:
            raise DomainError("epsilon must lie in (0, 1)")
        if self.z < self.min_height(self.d, self.epsilon):
            raise DomainError(f"z={self.z} below sqrt(d / (2 eps)) = {self.min_height(self.d, self.epsilon)}")

    @staticmethod
    def min_height(d: int, epsilon: float) -> float:
        return math.sqrt(d / (2.0 * epsilon))

    @classmethod
    def tight(cls, d: int, epsilon: float) -> "HammingEmbedding":
        return cls(d, cls.min_height(d, epsilon), epsilon)


def _bits(x: ArrayLike, d: int) -> NDArray[np.float64]:
    arr = np.asarray(x)
    if arr.shape[-1] != d:
        raise DomainError(f"expected bit-vectors of length {d}")
    if not np.all((arr == 0) | (arr == 1)):
        raise DomainError("Hamming cube inputs must be binary")
    return arr.astype(np.float64)


def embed_hamming(emb: HammingEmbedding, x: ArrayLike) -> NDArray[np.float64]:
    """Half-space point ``[z, x_1, ..., x_d]`` for a bit-vector (or a batch)."""
    bits = _bits(x, emb.d)
    z = np.full(bits.shape[:-1] + (1,), emb.z)
    return np.concatenate((z, bits), axis=-1)


def puiseux_sandwich(x):
    """``(sqrt(2x)(1 - x/12), arccosh(1 + x), sqrt(2x))`` for ``0 < x < 1``."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DomainError("Puiseux sandwich needs 0 < x < 1")
    upper = np.sqrt(2.0 * arr)
    lower = upper * (1.0 - arr / 12.0)
    mid = np.asarray(stable_arccosh1p(arr))
    if arr.ndim == 0:
        return float(lower), float(mid), float(upper)
    return lower, mid, upper


def verify_sandwich(emb: HammingEmbedding, xi: ArrayLike, xj: ArrayLike):
    """Whether ``sqrt(ham)(1 - eps/12) <= z d_H <= sqrt(ham)`` up to ``1e-12``.

    Accepts single bit-vectors or equally shaped batches.
    """
    a = _bits(xi, emb.d)
    b = _bits(xj, emb.d)
    ham = np.sum(np.abs(a - b), axis=-1)
    scaled = emb.z * np.asarray(distance_halfspace(embed_hamming(emb, a), embed_hamming(emb, b)))
    root = np.sqrt(ham)
    ok = (scaled <= root + SANDWICH_SLACK) & (root * (1.0 - emb.epsilon / 12.0) <= scaled + SANDWICH_SLACK)
    return bool(ok) if np.ndim(ok) == 0 else ok


def hamming_cube(d: int) -> NDArray[np.int8]:
    """All ``2**d`` vertices of the cube as rows."""
    return np.array(list(itertools.product((0, 1), repeat=d)), dtype=np.int8)


def verify_cube(d: int, epsilon: float) -> tuple[int, int]:
    """Check every unordered pair of the ``d``-cube at the tight height.

    Returns ``(passed, total)``.
    """
    emb = HammingEmbedding.tight(d, epsilon)
    cube = hamming_cube(d)
    i, j = np.triu_indices(len(cube), k=1)
    ok = verify_sandwich(emb, cube[i], cube[j])
    return int(np.count_nonzero(ok)), len(i)


def induced_approximation_factor(c_h: float, epsilon: float) -> float:
    """Hamming-side ratio ``(1 - eps/12)^2 / c_h^2`` induced by hyperbolic factor ``c_h``."""
    if not c_h > 1:
        raise DomainError("c_h must exceed 1")
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    return (1.0 - epsilon / 12.0) ** 2 / c_h**2
