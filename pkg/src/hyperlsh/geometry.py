"""Coordinate models of hyperbolic space H^d and conversions between them.

Three models are supported:

* Poincare ball: the open unit ball in R^d.
* Upper half-space: pairs ``(z, x)`` with ``z > 0`` and ``x`` in R^(d-1).
  As arrays these are stored as ``[z, x_1, ..., x_{d-1}]``.
* Hyperboloid: the upper sheet of ``<X, X> = -1`` for the Minkowski form of
  signature (-, +, ..., +), first coordinate negative.

The array functions broadcast over leading axes, so ``u`` may be a single
point of shape ``(d,)`` or a batch of shape ``(n, d)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

# points closer than this to the unit sphere are rejected, not clamped
BOUNDARY_EPS = 1e-12
HYPERBOLOID_TOL = 1e-9
_SERIES_CUTOFF = 1e-8


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


@dataclass(frozen=True)
class PoincarePoint:
    """A point of the Poincare ball model."""

    coords: NDArray[np.float64]

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 1 or coords.shape[0] < 2:
            raise DomainError("Poincare point needs a 1-d coordinate vector with d >= 2")
        _check_ball(coords)
        object.__setattr__(self, "coords", coords)

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    @property
    def dim(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class HalfSpacePoint:
    """A point ``(z, x)`` of the upper half-space model."""

    z: float
    x: NDArray[np.float64]

    def __post_init__(self) -> None:
        x = np.atleast_1d(np.asarray(self.x, dtype=np.float64))
        if x.ndim != 1:
            raise DomainError("half-space boundary coordinate must be a vector")
        if not self.z > 0:
            raise DomainError(f"half-space height must be positive, got {self.z}")
        object.__setattr__(self, "z", float(self.z))
        object.__setattr__(self, "x", x)

    def __array__(self, dtype=None, copy=None):
        arr = np.concatenate(([self.z], self.x))
        return arr if dtype is None else arr.astype(dtype)

    @property
    def dim(self) -> int:
        return self.x.shape[0] + 1

    @classmethod
    def from_array(cls, arr: ArrayLike) -> "HalfSpacePoint":
        arr = np.asarray(arr, dtype=np.float64)
        return cls(arr[0], arr[1:])


@dataclass(frozen=True)
class HyperboloidPoint:
    """A point ``(x_0, ..., x_d)`` on the upper sheet of the hyperboloid."""

    coords: NDArray[np.float64]

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 1 or coords.shape[0] < 3:
            raise DomainError("hyperboloid point needs d + 1 >= 3 coordinates")
        norm = minkowski_dot(coords, coords)
        if abs(norm + 1.0) > HYPERBOLOID_TOL * max(1.0, coords[0] ** 2) or coords[0] < 1.0:
            raise DomainError(f"not on the upper hyperboloid sheet (Minkowski norm {norm})")
        object.__setattr__(self, "coords", coords)

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    @property
    def dim(self) -> int:
        return self.coords.shape[0] - 1


def _check_ball(u: NDArray[np.float64]) -> NDArray[np.float64]:
    sq = np.sum(u * u, axis=-1)
    if np.any(~np.isfinite(sq)) or np.any(sq >= (1.0 - BOUNDARY_EPS) ** 2):
        raise DomainError("point lies on or outside the boundary of the unit ball")
    return sq


def _check_halfspace(p: NDArray[np.float64]) -> None:
    if p.shape[-1] < 2:
        raise DomainError("half-space points need at least 2 coordinates (z, x)")
    if np.any(~(p[..., 0] > 0)):
        raise DomainError("half-space height must be positive")


def minkowski_dot(a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    """Minkowski bilinear form ``-a_0 b_0 + sum_{i>=1} a_i b_i``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return np.sum(a[..., 1:] * b[..., 1:], axis=-1) - a[..., 0] * b[..., 0]


def stable_arccosh1p(w: ArrayLike) -> NDArray[np.float64] | float:
    """Evaluate ``arccosh(1 + w)`` without cancellation for small ``w``.

    Uses ``log1p(w + sqrt(w (w + 2)))``, switching to the Puiseux series
    ``sqrt(2w) (1 - w/12 + 3 w^2/160)`` below ``w = 1e-8``.
    """
    w_arr = np.asarray(w, dtype=np.float64)
    if np.any(w_arr < 0) or np.any(np.isnan(w_arr)):
        raise DomainError("arccosh(1 + w) requires w >= 0")
    with np.errstate(invalid="ignore"):
        direct = np.log1p(w_arr + np.sqrt(w_arr * (w_arr + 2.0)))
    series = np.sqrt(2.0 * w_arr) * (1.0 - w_arr / 12.0 + 3.0 * w_arr * w_arr / 160.0)
    out = np.where(w_arr < _SERIES_CUTOFF, series, direct)
    return float(out) if out.ndim == 0 else out


def _scalar_or_array(out: NDArray[np.float64]):
    return float(out) if np.ndim(out) == 0 else out


def distance_poincare(u: ArrayLike, v: ArrayLike):
    """Hyperbolic distance between points of the Poincare ball."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    su = _check_ball(u)
    sv = _check_ball(v)
    diff = u - v
    num = 2.0 * np.sum(diff * diff, axis=-1)
    return _scalar_or_array(stable_arccosh1p(num / ((1.0 - su) * (1.0 - sv))))


def distance_halfspace(p: ArrayLike, q: ArrayLike):
    """Hyperbolic distance in the upper half-space model (arrays ``[z, x...]``)."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    _check_halfspace(p)
    _check_halfspace(q)
    diff = p - q
    num = np.sum(diff * diff, axis=-1)
    return _scalar_or_array(stable_arccosh1p(num / (2.0 * p[..., 0] * q[..., 0])))


def distance_hyperboloid(a: ArrayLike, b: ArrayLike):
    """Hyperbolic distance ``arccosh(-<a, b>)`` on the hyperboloid."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    w = -minkowski_dot(a, b) - 1.0
    if np.any(w < -HYPERBOLOID_TOL):
        raise DomainError("-<a, b> < 1: points are not on the hyperboloid")
    # on the sheet <a - b, a - b> = 2w, and this form avoids cancellation for close points
    diff = a - b
    chord = np.sqrt(np.maximum(minkowski_dot(diff, diff), 0.0))
    return _scalar_or_array(2.0 * np.arcsinh(chord / 2.0))


def poincare_norm(u: ArrayLike):
    """Hyperbolic distance from the ball origin, ``2 artanh(|u|)``."""
    u = np.asarray(u, dtype=np.float64)
    sq = _check_ball(u)
    return _scalar_or_array(2.0 * np.arctanh(np.sqrt(sq)))


def poincare_to_hyperboloid(u: ArrayLike) -> NDArray[np.float64]:
    u = np.asarray(u, dtype=np.float64)
    sq = _check_ball(u)
    denom = (1.0 - sq)[..., None]
    x0 = (1.0 + sq)[..., None] / denom
    return np.concatenate((x0, 2.0 * u / denom), axis=-1)


def hyperboloid_to_poincare(x: ArrayLike) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=np.float64)
    if np.any(x[..., 0] < 1.0 - HYPERBOLOID_TOL):
        raise DomainError("point is not on the upper hyperboloid sheet")
    return x[..., 1:] / (1.0 + x[..., 0])[..., None]


def halfspace_to_poincare(p: ArrayLike) -> NDArray[np.float64]:
    """Cayley-type isometry from the half-space to the ball.

    ``(z, x)`` maps to ``(2x, 1 - |x|^2 - z^2) / (|x|^2 + (1 + z)^2)``, so the
    base point ``z = 1, x = 0`` lands on the origin and the height axis
    becomes the last ball coordinate.
    """
    p = np.asarray(p, dtype=np.float64)
    _check_halfspace(p)
    z = p[..., :1]
    x = p[..., 1:]
    xsq = np.sum(x * x, axis=-1, keepdims=True)
    denom = xsq + (1.0 + z) ** 2
    return np.concatenate((2.0 * x / denom, (1.0 - xsq - z * z) / denom), axis=-1)


def poincare_to_halfspace(u: ArrayLike) -> NDArray[np.float64]:
    """Inverse of :func:`halfspace_to_poincare`."""
    u = np.asarray(u, dtype=np.float64)
    sq = _check_ball(u)[..., None]
    head = u[..., :-1]
    last = u[..., -1:]
    denom = np.sum(head * head, axis=-1, keepdims=True) + (1.0 + last) ** 2
    z = (1.0 - sq) / denom
    return np.concatenate((z, 2.0 * head / denom), axis=-1)


def halfspace_to_hyperboloid(p: ArrayLike) -> NDArray[np.float64]:
    p = np.asarray(p, dtype=np.float64)
    _check_halfspace(p)
    z = p[..., :1]
    x = p[..., 1:]
    s = np.sum(x * x, axis=-1, keepdims=True) + z * z
    return np.concatenate(((1.0 + s) / (2.0 * z), x / z, (1.0 - s) / (2.0 * z)), axis=-1)


def hyperboloid_to_halfspace(x: ArrayLike) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=np.float64)
    z = 1.0 / (x[..., :1] + x[..., -1:])
    return np.concatenate((z, x[..., 1:-1] * z), axis=-1)


def pairwise_distances_poincare(u: ArrayLike) -> NDArray[np.float64]:
    """Full ``(n, n)`` matrix of hyperbolic distances between ball points."""
    u = np.asarray(u, dtype=np.float64)
    sq = _check_ball(u)
    n, d = u.shape
    if d <= 16:
        diff_sq = np.zeros((n, n))
        for k in range(d):
            col = u[:, k]
            diff_sq += (col[:, None] - col[None, :]) ** 2
    else:
        # Gram form loses ~1e-16 absolute; fine for threshold classification
        diff_sq = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (u @ u.T), 0.0)
        np.fill_diagonal(diff_sq, 0.0)
    conf = 1.0 - sq
    return stable_arccosh1p(2.0 * diff_sq / np.outer(conf, conf))


def mobius_add(p: ArrayLike, v: ArrayLike) -> NDArray[np.float64]:
    """Mobius addition ``p (+) v`` in the ball: the isometry taking 0 to ``p``, applied to ``v``."""
    p = np.asarray(p, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    pv = np.sum(p * v, axis=-1, keepdims=True)
    pp = np.sum(p * p, axis=-1, keepdims=True)
    vv = np.sum(v * v, axis=-1, keepdims=True)
    num = (1.0 + 2.0 * pv + vv) * p + (1.0 - pp) * v
    return num / (1.0 + 2.0 * pv + pp * vv)


def point_at_distance(p: ArrayLike, delta: ArrayLike, rng: np.random.Generator) -> NDArray[np.float64]:
    """Ball point(s) at hyperbolic distance ``delta`` from ``p`` in a uniformly random direction."""
    p = np.atleast_2d(np.asarray(p, dtype=np.float64))
    delta = np.broadcast_to(np.asarray(delta, dtype=np.float64), p.shape[:1])
    direction = rng.standard_normal(p.shape)
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    return mobius_add(p, direction * np.tanh(delta / 2.0)[:, None])
