"""Hashing in H^d, d >= 3: Gaussian projection to H^2 followed by a random geodesic.

A point ``(z, x)`` of the half-space model is sent to ``(z, a . x)`` in the
half-plane with ``a ~ N(0, I)``, moved into the Poincare disk and labelled
by a geodesic drawn from the kinematic measure on ``B(0, R)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .dimreduce import ProjectionMap, alpha_constant
from .geodesic_hash import Geodesic, KinematicSampler, hash_labels, paired_labels, sample_geodesic
from .geometry import DomainError, halfspace_to_poincare, poincare_norm
from .lsh2d import R_MARGIN, separation_scale

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HdHasher:
    projection: ProjectionMap
    sampler_R: float
    geodesic: Geodesic

    def __post_init__(self) -> None:
        if self.projection.target_dim != 2:
            raise DomainError("HdHasher projects onto a single boundary coordinate")

    @property
    def dim(self) -> int:
        return self.projection.source_dim

    @property
    def direction(self) -> NDArray[np.float64]:
        return self.projection.matrix[0]

    def to_dict(self) -> dict:
        return {
            "a": self.direction.tolist(),
            "R": self.sampler_R,
            "t": self.geodesic.t,
            "theta": self.geodesic.theta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HdHasher":
        return cls(ProjectionMap(np.asarray(data["a"])[None, :]), data["R"], Geodesic(data["t"], data["theta"]))


def new_hd_hasher(d: int, sampler_R: float, rng: np.random.Generator) -> HdHasher:
    """Fresh Gaussian direction of length ``d - 1`` and a fresh geodesic."""
    if d < 3:
        raise DomainError("H^d hashing needs d >= 3; use the planar family for d = 2")
    a = rng.standard_normal(d - 1)
    return HdHasher(ProjectionMap(a[None, :]), sampler_R, sample_geodesic(KinematicSampler(sampler_R), rng))


def project_to_plane(a: ArrayLike, points: ArrayLike) -> NDArray[np.float64]:
    """Half-plane images ``(z, a . x)`` for direction(s) ``a``.

    With ``a`` of shape ``(m, d - 1)`` and ``points`` of shape ``(n, d)`` the
    result has shape ``(m, n, 2)``.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[1] != a.shape[1] + 1:
        raise DomainError(f"point dimension {pts.shape[1]} does not match projection ({a.shape[1] + 1})")
    xs = a @ pts[:, 1:].T
    zs = np.broadcast_to(pts[:, 0], xs.shape)
    return np.stack((zs, xs), axis=-1)


def clamp_to_ball(u: NDArray[np.float64], R: float) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    """Radially pull disk points with hyperbolic norm above ``R`` onto the sphere of radius ``R``."""
    norms = np.linalg.norm(u, axis=-1)
    limit = math.tanh(R / 2.0)
    outside = norms > limit
    if np.any(outside):
        u = u.copy()
        u[outside] *= (limit / norms[outside])[:, None]
    return u, outside


def project_to_disk(h: HdHasher, p: ArrayLike, clamp: bool = False):
    """Disk image of ``p`` under ``h``'s projection, plus an out-of-ball flag."""
    plane = project_to_plane(h.direction, p)[0]
    disk = halfspace_to_poincare(plane)
    outside = poincare_norm(disk) > h.sampler_R
    if np.any(outside):
        if not clamp:
            raise DomainError(f"projected point lies outside B(0, {h.sampler_R})")
        disk, outside = clamp_to_ball(disk, h.sampler_R)
        logger.debug("clamped %d projected point(s) onto B(0, %g)", int(outside.sum()), h.sampler_R)
    return disk, outside


def hash_hd(h: HdHasher, p: ArrayLike, clamp: bool = False):
    """Label of a half-space point (or +1/-1 array for a batch) under ``h``."""
    p = np.asarray(p, dtype=np.float64)
    single = p.ndim == 1
    disk, _ = project_to_disk(h, np.atleast_2d(p), clamp=clamp)
    labels = hash_labels(h.geodesic.t, h.geodesic.theta, disk)[0]
    return int(labels[0]) if single else labels


def adaptive_radius(a: ArrayLike, points: ArrayLike, floor: float = 0.0, margin: float = R_MARGIN):
    """Per-direction hashing radius: largest projected hyperbolic norm plus ``margin``.

    Returns an array of shape ``(m,)`` for ``m`` directions, never below ``floor``.
    """
    plane = project_to_plane(a, points)
    norms = poincare_norm(halfspace_to_poincare(plane))
    return np.maximum(np.max(norms, axis=-1) + margin, floor)


def sample_hd_labels(
    points: ArrayLike, m: int, rng: np.random.Generator, floor_R: float = 0.0
) -> NDArray[np.int8]:
    """Labels of ``points`` under ``m`` fresh hashers with adaptive radii.

    Each hasher draws a Gaussian direction, sets its radius to cover the
    projected points (at least ``floor_R``) and then samples its geodesic.
    Returns an ``(m, n)`` array of +1/-1.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    a = rng.standard_normal((m, pts.shape[1] - 1))
    disk = halfspace_to_poincare(project_to_plane(a, pts))
    radii = np.maximum(np.max(poincare_norm(disk), axis=-1) + R_MARGIN, floor_R)
    u = rng.random(m)
    theta = 2.0 * math.pi * rng.random(m)
    t = np.minimum(np.arcsinh(u * np.sinh(radii)), radii)
    return paired_labels(t, theta, disk)


def collision_bounds_hd(r: float, sampler_R: float) -> tuple[float, float]:
    """Band ``(1 - r/w, 1 - alpha r/w)`` containing the collision probability at distance ``r``."""
    w = separation_scale(sampler_R)
    if r < 0:
        raise DomainError("r must be nonnegative")
    lower = 1.0 - r / w
    if lower < 0:
        raise DomainError(f"r={r} too large for sampler radius {sampler_R}")
    return lower, 1.0 - alpha_constant() * r / w


def min_approximation_factor() -> float:
    """Smallest ``c`` for which the H^d bounds separate near from far: ``1 / alpha``."""
    return 1.0 / alpha_constant()


def estimate_collision_hd(
    p: ArrayLike, q: ArrayLike, sampler_R: float, m: int, rng: np.random.Generator
) -> float:
    """Fraction of ``m`` fresh hashers with common radius ``sampler_R`` giving ``p`` and ``q`` equal labels.

    Raises :class:`DomainError` if any projection leaves ``B(0, sampler_R)``.
    """
    pts = np.stack((np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64)))
    if pts.shape[1] < 3:
        raise DomainError("H^d hashing needs d >= 3")
    a = rng.standard_normal((m, pts.shape[1] - 1))
    disk = halfspace_to_poincare(project_to_plane(a, pts))
    if np.any(poincare_norm(disk) > sampler_R):
        raise DomainError(f"a projected point lies outside B(0, {sampler_R})")
    t, theta = KinematicSampler(sampler_R).sample_many(rng, m)
    labels = paired_labels(t, theta, disk)
    return float(np.count_nonzero(labels[:, 0] == labels[:, 1])) / m
