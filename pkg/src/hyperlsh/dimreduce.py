"""Dimension reduction in the half-space model.

Points ``(z, x)`` of H^d are mapped to ``(z, f(x))`` for a linear map ``f``
of the boundary coordinates; heights are left untouched.  The hyperbolic
stretch of every pair is then sandwiched by the Euclidean stretch of ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import erfc

from .geometry import DomainError, stable_arccosh1p

JL_CONSTANT = 8.0
_STRETCH_SLACK = 1e-12


@dataclass(frozen=True)
class ProjectionMap:
    """Linear map on boundary coordinates: ``x -> scale * matrix @ x``.

    ``matrix`` has shape ``(k - 1, d - 1)`` for a map H^d -> H^k.
    """

    matrix: NDArray[np.float64]
    scale: float = 1.0

    def __post_init__(self) -> None:
        matrix = np.atleast_2d(np.asarray(self.matrix, dtype=np.float64))
        if matrix.ndim != 2:
            raise DomainError("projection matrix must be 2-dimensional")
        if not self.scale > 0:
            raise DomainError("projection scale must be positive")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def source_dim(self) -> int:
        return self.matrix.shape[1] + 1

    @property
    def target_dim(self) -> int:
        return self.matrix.shape[0] + 1

    @classmethod
    def identity(cls, d: int) -> "ProjectionMap":
        return cls(np.eye(d - 1))

    @classmethod
    def gaussian(cls, d: int, k: int, rng: np.random.Generator, scale: float = 1.0) -> "ProjectionMap":
        return cls(rng.standard_normal((k - 1, d - 1)), scale)


def big_f(z1, z2, r):
    """Half-space distance between heights ``z1, z2`` at boundary separation ``r``."""
    z1 = np.asarray(z1, dtype=np.float64)
    z2 = np.asarray(z2, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if np.any(~(z1 > 0)) or np.any(~(z2 > 0)):
        raise DomainError("heights must be positive")
    if np.any(r < 0):
        raise DomainError("boundary separation must be nonnegative")
    out = stable_arccosh1p((r * r + (z1 - z2) ** 2) / (2.0 * z1 * z2))
    return float(out) if np.ndim(out) == 0 else out


def check_f_stretch(z1, z2, r, gamma):
    """Whether ``F(gamma r)`` sits on the correct side of ``gamma F(r)``.

    For ``gamma >= 1`` the stretched distance may not exceed ``gamma F(r)``;
    for ``gamma <= 1`` it may not fall below it.  Vectorized.
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    lhs = np.asarray(big_f(z1, z2, gamma * np.asarray(r, dtype=np.float64)))
    rhs = gamma * np.asarray(big_f(z1, z2, r))
    up = (gamma >= 1.0) & (lhs <= rhs + _STRETCH_SLACK)
    down = (gamma <= 1.0) & (lhs >= rhs - _STRETCH_SLACK)
    out = up | down
    return bool(out) if out.ndim == 0 else out


def project_point(pmap: ProjectionMap, p: ArrayLike) -> NDArray[np.float64]:
    """Apply ``(z, x) -> (z, scale * matrix @ x)`` to one point or a batch."""
    p = np.asarray(p, dtype=np.float64)
    if p.shape[-1] != pmap.source_dim:
        raise DomainError(f"point has dimension {p.shape[-1]}, map expects {pmap.source_dim}")
    x_new = (p[..., 1:] @ pmap.matrix.T) * pmap.scale
    return np.concatenate((p[..., :1], x_new), axis=-1)


def jl_target_dim(n: int, epsilon: float) -> int:
    """Target dimension ``k`` with ``k - 1 = ceil(8 ln n / eps^2)``."""
    return math.ceil(JL_CONSTANT * math.log(n) / epsilon**2) + 1


def jl_transform(points: ArrayLike, epsilon: float, rng: np.random.Generator):
    """Gaussian Johnson-Lindenstrauss projection of half-space points."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n, d = pts.shape
    if n < 2:
        raise DomainError("need at least 2 points")
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    k = jl_target_dim(n, epsilon)
    pmap = ProjectionMap.gaussian(d, k, rng, scale=1.0 / math.sqrt(k - 1))
    return pmap, project_point(pmap, pts)


def alpha_terms() -> tuple[float, float]:
    """The two lower-bound contributions ``sqrt(2/pi)(1 - e^{-1/2})`` and ``erfc(1/sqrt 2)``."""
    return math.sqrt(2.0 / math.pi) * -math.expm1(-0.5), float(erfc(1.0 / math.sqrt(2.0)))


def alpha_constant() -> float:
    first, second = alpha_terms()
    return first + second
