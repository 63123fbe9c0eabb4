"""The geodesic LSH family on the hyperbolic plane.

Two points at hyperbolic distance ``r`` inside ``B(0, R)`` collide under a
random geodesic with probability ``1 - r / (pi sinh R)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .geodesic_hash import KinematicSampler, hash_labels
from .geometry import DomainError, poincare_norm

R_MARGIN = 1e-6
_MC_CHUNK = 1 << 18


def separation_scale(R: float) -> float:
    """``w = pi sinh R``; the collision probability is ``1 - r / w``."""
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    return math.pi * math.sinh(R)


def collision_probability(r: float, R: float) -> float:
    w = separation_scale(R)
    if r < 0 or r > w:
        raise DomainError(f"r={r} outside [0, pi sinh R = {w}]")
    return 1.0 - r / w


def rho_bound(c: float) -> float:
    if not c > 1:
        raise DomainError(f"approximation factor must exceed 1, got {c}")
    return 1.0 / c


def rho_exact(r: float, c: float, R: float) -> float:
    """``ln(1 - r/w) / ln(1 - c r/w)`` with ``w = pi sinh R``."""
    if not c > 1:
        raise DomainError(f"approximation factor must exceed 1, got {c}")
    w = separation_scale(R)
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    if c * r >= w:
        raise DomainError("c r >= pi sinh R: far-pair collision probability is not positive")
    return math.log1p(-r / w) / math.log1p(-c * r / w)


@dataclass(frozen=True)
class LshFamilyParams:
    """``(r, c, R)`` with the sensitivity values ``p1, p2, rho`` of the 2D family."""

    r: float
    c: float
    R: float
    p1: float
    p2: float
    rho: float

    @classmethod
    def create(cls, r: float, c: float, R: float) -> "LshFamilyParams":
        rho = rho_exact(r, c, R)
        return cls(r, c, R, collision_probability(r, R), collision_probability(c * r, R), rho)


def choose_radius(points: ArrayLike, margin: float = R_MARGIN) -> float:
    """Smallest hashing radius covering a dataset of disk points, plus ``margin``."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[0] == 0:
        return margin
    return float(np.max(poincare_norm(pts))) + margin


def estimate_collision_mc(
    x: ArrayLike, y: ArrayLike, R: float, n_samples: int, rng: np.random.Generator
) -> float:
    """Fraction of ``n_samples`` random geodesics that do not separate ``x`` and ``y``."""
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    pts = np.array([x, y], dtype=np.float64)
    if np.any(poincare_norm(pts) > R):
        raise DomainError(f"points must lie inside B(0, {R})")
    sampler = KinematicSampler(R)
    separated = 0
    remaining = n_samples
    while remaining:
        m = min(remaining, _MC_CHUNK)
        t, theta = sampler.sample_many(rng, m)
        labels = hash_labels(t, theta, pts)
        separated += int(np.count_nonzero(labels[:, 0] != labels[:, 1]))
        remaining -= m
    return 1.0 - separated / n_samples


def log_ratio(x, ell):
    """``ln(1 - x) / ln(1 - ell x)``, which never exceeds ``1 / ell``."""
    x = np.asarray(x, dtype=np.float64)
    return np.log1p(-x) / np.log1p(-ell * x)
