"""Random geodesics of the hyperbolic plane and the geodesic-side hash.

A geodesic is described by polar coordinates ``(t, theta)`` relative to the
disk origin: ``t`` is its hyperbolic distance from the origin and ``theta``
the direction of the perpendicular foot.  Sampling follows the kinematic
measure ``cosh(t) dt dtheta`` restricted to geodesics that meet the
hyperbolic disk ``B(0, R)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from .geometry import DomainError, minkowski_dot

TWO_PI = 2.0 * math.pi


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested accuracy."""


@dataclass(frozen=True)
class Geodesic:
    """A geodesic of the Poincare disk in polar coordinates ``(t, theta)``.

    ``center`` and ``radius`` describe the Euclidean circle carrying the arc;
    both are ``None`` when ``t == 0`` (a diameter through the origin).
    ``normal`` is the unit spacelike vector ``u`` with ``{<x, u> = 0}`` the
    geodesic on the hyperboloid.
    """

    t: float
    theta: float
    center: NDArray[np.float64] | None = field(init=False, repr=False, compare=False)
    radius: float | None = field(init=False, repr=False, compare=False)
    normal: NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        t = float(self.t)
        if not t >= 0 or not math.isfinite(t):
            raise DomainError(f"geodesic distance from origin must be >= 0, got {t}")
        theta = float(self.theta) % TWO_PI
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "theta", theta)
        direction = np.array([math.cos(theta), math.sin(theta)])
        if t > 0:
            # subnormal t gives an infinite circle; hashing never reads it
            with np.errstate(over="ignore", divide="ignore"):
                object.__setattr__(self, "center", direction / np.float64(math.tanh(t)))
                object.__setattr__(self, "radius", float(np.float64(1.0) / np.float64(math.sinh(t))))
        else:
            object.__setattr__(self, "center", None)
            object.__setattr__(self, "radius", None)
        normal = np.array([math.sinh(t), math.cosh(t) * direction[0], math.cosh(t) * direction[1]])
        object.__setattr__(self, "normal", normal)

    @property
    def is_diameter(self) -> bool:
        return self.t == 0.0

    def to_dict(self) -> dict:
        return {"t": self.t, "theta": self.theta}


@dataclass(frozen=True)
class KinematicSampler:
    """Samples geodesics meeting ``B(0, R)`` under the normalized kinematic measure."""

    R: float

    def __post_init__(self) -> None:
        if not self.R > 0 or not math.isfinite(self.R):
            raise DomainError(f"sampler radius must be positive, got {self.R}")

    @property
    def total_measure(self) -> float:
        """Kinematic measure of all geodesics meeting ``B(0, R)``: ``2 pi sinh R``."""
        return TWO_PI * math.sinh(self.R)

    def t_from_uniform(self, u: ArrayLike):
        """Inverse CDF of the radial law ``cosh(t) / sinh(R)`` on ``[0, R]``."""
        t = np.arcsinh(np.asarray(u, dtype=np.float64) * math.sinh(self.R))
        return np.minimum(t, self.R)

    def sample(self, rng: np.random.Generator) -> Geodesic:
        return sample_geodesic(self, rng)

    def sample_many(self, rng: np.random.Generator, size: int) -> tuple[NDArray, NDArray]:
        """Draw ``size`` geodesics as arrays ``(t, theta)``."""
        u = rng.random(size)
        theta = TWO_PI * rng.random(size)
        return self.t_from_uniform(u), theta


def sample_geodesic(sampler: KinematicSampler, rng: np.random.Generator) -> Geodesic:
    u = rng.random()
    theta = TWO_PI * rng.random()
    return Geodesic(float(sampler.t_from_uniform(u)), theta)


def side_values(t: ArrayLike, theta: ArrayLike, x: ArrayLike) -> NDArray[np.float64]:
    """Signed side value of disk points relative to geodesics.

    Equals ``tanh(t) * (|x - c|^2 - b^2)`` for the circle of center ``c`` and
    radius ``b``; since ``coth^2 t - csch^2 t = 1`` this is
    ``tanh(t) (1 + |x|^2) - 2 x . e(theta)``, which stays finite at ``t = 0``.

    ``t`` and ``theta`` have shape ``(m,)`` and ``x`` shape ``(n, 2)``; the
    result has shape ``(m, n)``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    sq = np.sum(x * x, axis=-1)
    proj = np.outer(np.cos(theta), x[:, 0]) + np.outer(np.sin(theta), x[:, 1])
    return np.tanh(t)[:, None] * (1.0 + sq)[None, :] - 2.0 * proj


def hash_labels(t: ArrayLike, theta: ArrayLike, x: ArrayLike) -> NDArray[np.int8]:
    """Vectorized :func:`hash_side`: ``(m, n)`` array of +1/-1 labels."""
    return np.where(side_values(t, theta, x) >= 0.0, 1, -1).astype(np.int8)


def paired_labels(t: ArrayLike, theta: ArrayLike, x: ArrayLike) -> NDArray[np.int8]:
    """Labels when each geodesic has its own point set: ``x`` has shape ``(m, n, 2)``."""
    t = np.asarray(t, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    sq = np.sum(x * x, axis=-1)
    proj = x[..., 0] * np.cos(theta)[:, None] + x[..., 1] * np.sin(theta)[:, None]
    side = np.tanh(t)[:, None] * (1.0 + sq) - 2.0 * proj
    return np.where(side >= 0.0, 1, -1).astype(np.int8)


def hash_side(g: Geodesic, x: ArrayLike) -> int:
    """Which side of ``g`` the disk point ``x`` lies on, as +1 or -1.

    The label is ``sgn(|x - c|^2 - b^2)``; a point on the geodesic gets +1.
    Diameters (``t == 0``) use the same expression in the limit, which is
    ``-sgn <X, u>`` for the hyperboloid lift ``X`` of ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (2,):
        raise DomainError("geodesic hashing is defined on the Poincare disk (d = 2)")
    if x @ x >= 1.0:
        raise DomainError("point lies outside the unit disk")
    return int(hash_labels(g.t, g.theta, x[None, :])[0, 0])


def hash_side_minkowski(g: Geodesic, x: ArrayLike) -> int:
    """``sgn <x, u>`` for a hyperboloid point ``x``; ties give +1."""
    x = np.asarray(x, dtype=np.float64)
    return 1 if float(minkowski_dot(x, g.normal)) >= 0.0 else -1


def separates(g: Geodesic, x: ArrayLike, y: ArrayLike) -> bool:
    return hash_side(g, x) != hash_side(g, y)


def separation_boundary_t(r: float, theta: ArrayLike):
    """Largest ``t`` at which a geodesic with foot angle ``theta`` still
    separates two points at distance ``r`` placed symmetrically on the x-axis.
    """
    c = np.abs(np.cos(np.asarray(theta, dtype=np.float64)))
    return np.arctanh(math.tanh(r / 2.0) * c)


def separation_measure_quadrature(r: float) -> float:
    """Kinematic measure of geodesics separating two points at distance ``r``.

    Integrates ``2 * int_{-pi/2}^{pi/2} sinh(artanh(tanh(r/2) cos th)) dth``
    numerically (the inner ``t`` integral of ``cosh`` is done in closed form).
    The exact value is ``2r``.
    """
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    a = math.tanh(r / 2.0)

    def integrand(th: float) -> float:
        return math.sinh(math.atanh(a * math.cos(th)))

    value, abserr, info, *rest = integrate.quad(
        integrand, -math.pi / 2, math.pi / 2, epsabs=1e-13, epsrel=1e-13, limit=200, full_output=1
    )
    if rest:
        raise QuadratureError(f"quad did not converge for r={r}: {rest[0]}")
    return 2.0 * value
