"""(c, r)-approximate nearest-neighbor index over hyperbolic LSH.

The index holds ``L`` tables.  Table ``l`` keys every point by the ``K``
labels it receives from that table's hash functions, packed as bits
(label +1 -> bit 1).  Planar data (d = 2) is hashed by geodesics;
higher-dimensional data by a Gaussian projection to the half-plane followed
by a geodesic.
"""

from __future__ import annotations

import base64
import json
import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .geodesic_hash import KinematicSampler, hash_labels, paired_labels
from .geometry import (
    DomainError,
    distance_halfspace,
    distance_poincare,
    halfspace_to_poincare,
    poincare_norm,
    poincare_to_halfspace,
)
from .lsh2d import R_MARGIN, choose_radius, collision_probability
from .lsh_hd import clamp_to_ball, collision_bounds_hd, min_approximation_factor, project_to_plane

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MODELS = ("ball", "halfspace")


@dataclass(frozen=True)
class IndexParams:
    K: int
    L: int
    r: float
    c: float

    def __post_init__(self) -> None:
        if self.K < 1 or self.L < 1:
            raise DomainError("K and L must be >= 1")
        if not self.r > 0 or not self.c > 1:
            raise DomainError("need r > 0 and c > 1")


def choose_params(n: int, p1: float, p2: float) -> tuple[int, int]:
    """Standard LSH reduction: ``K = ceil(ln n / ln(1/p2))``, ``L = ceil(n^rho)``."""
    if n < 1:
        raise DomainError("n must be positive")
    if not 0 < p2 < p1 <= 1:
        raise DomainError(f"need 0 < p2 < p1 <= 1, got p1={p1}, p2={p2}")
    K = max(1, math.ceil(math.log(n) / -math.log(p2)))
    # p1 = 1 (near pairs always collide) gives rho = 0 and a single table
    rho = math.log(p1) / math.log(p2)
    L = max(1, math.ceil(n**rho))
    return K, L


def _pack(labels: NDArray[np.int8]) -> list[bytes]:
    """Pack rows of +1/-1 labels into byte strings."""
    bits = np.packbits(labels > 0, axis=-1)
    return [row.tobytes() for row in bits]


def _to_ball(points, model):
    return points if model == "ball" else halfspace_to_poincare(points)


def _to_halfspace(points, model):
    return points if model == "halfspace" else poincare_to_halfspace(points)


def _validate_points(points: NDArray[np.float64], model: str) -> None:
    if model == "ball":
        poincare_norm(points)
    elif model == "halfspace":
        if np.any(~(points[:, 0] > 0)):
            raise DomainError("half-space heights must be positive")
    else:
        raise DomainError(f"unknown point model {model!r}")


class LshIndex:
    """Immutable after :meth:`build`; queries only read shared state."""

    def __init__(
        self,
        params: IndexParams,
        points: NDArray[np.float64],
        model: str,
        hashers: dict,
        tables: list[dict[bytes, list[int]]],
    ) -> None:
        self.params = params
        self.points = points
        self.model = model
        self.hashers = hashers
        self.tables = tables

    # -- construction ---------------------------------------------------

    @classmethod
    def build(
        cls,
        points: ArrayLike,
        r: float,
        c: float,
        rng: np.random.Generator,
        model: str = "ball",
        overrides: tuple[int, int] | None = None,
        R: float | None = None,
    ) -> "LshIndex":
        """Build an index for ``points``.

        ``model`` is ``"ball"`` (Poincare coordinates) or ``"halfspace"``
        (rows ``[z, x...]``).  Points are stored as given.  Planar data is
        hashed by geodesics of ``B(0, R)``; for d >= 3 each hash function
        gets its own radius covering the projected dataset (never below the
        reference radius).  ``R`` overrides the radius derived from the data.
        """
        pts = np.asarray(points, dtype=np.float64)
        if pts.size == 0:
            pts = pts.reshape(0, pts.shape[-1] if pts.ndim == 2 else 2)
        if pts.ndim != 2 or pts.shape[1] < 2:
            raise DomainError("points must form an (n, d) array with d >= 2")
        _validate_points(pts, model)
        n, dim = pts.shape
        if n and R is None:
            R = choose_radius(_to_ball(pts, model))
        elif R is None:
            R = 1.0

        if dim == 2:
            p1 = collision_probability(r, R)
            p2 = collision_probability(c * r, R)
        else:
            if overrides is None and c < min_approximation_factor():
                raise DomainError(f"c={c} below 1/alpha={min_approximation_factor():.4f}; pass explicit (K, L)")
            p1 = collision_bounds_hd(r, R)[0]
            p2 = collision_bounds_hd(c * r, R)[1]

        if overrides is not None:
            K, L = overrides
        elif n <= 1:
            K, L = 1, 1
        else:
            K, L = choose_params(n, p1, p2)
        params = IndexParams(int(K), int(L), float(r), float(c))
        m = params.K * params.L
        if dim == 2:
            t, theta = KinematicSampler(R).sample_many(rng, m)
            hashers = {"kind": "geodesic", "R": float(R), "t": t, "theta": theta}
        else:
            a = rng.standard_normal((m, dim - 1))
            radii = np.full(m, float(R))
            if n:
                disk = halfspace_to_poincare(project_to_plane(a, _to_halfspace(pts, model)))
                radii = np.maximum(np.max(poincare_norm(disk), axis=1) + R_MARGIN, radii)
            u = rng.random(m)
            theta = 2.0 * math.pi * rng.random(m)
            t = np.minimum(np.arcsinh(u * np.sinh(radii)), radii)
            hashers = {"kind": "projected", "R": radii, "a": a, "t": t, "theta": theta}
        index = cls(params, pts, model, hashers, [])
        index.tables = index._fill_tables()
        return index

    def _fill_tables(self) -> list[dict[bytes, list[int]]]:
        tables: list[dict[bytes, list[int]]] = [{} for _ in range(self.params.L)]
        if len(self.points) == 0:
            return tables
        keys = self.keys(self.points)
        for ell, table in enumerate(tables):
            for pid, key in enumerate(keys[ell]):
                table.setdefault(key, []).append(pid)
        return tables

    # -- hashing --------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def _labels(self, pts: NDArray[np.float64], sl: slice, clamp: bool = False) -> NDArray[np.int8]:
        """Labels of ``pts`` under the hash functions in ``sl``: shape ``(len, n)``."""
        h = self.hashers
        t, theta = h["t"][sl], h["theta"][sl]
        if h["kind"] == "geodesic":
            disk = _to_ball(pts, self.model)
            if clamp:
                disk, outside = clamp_to_ball(disk, h["R"])
                if outside.any():
                    logger.warning("clamped %d query point(s) onto B(0, %g)", int(outside.sum()), h["R"])
            return hash_labels(t, theta, disk)
        disk = halfspace_to_poincare(project_to_plane(h["a"][sl], _to_halfspace(pts, self.model)))
        if clamp:
            norms = np.linalg.norm(disk, axis=-1)
            limit = np.tanh(h["R"][sl] / 2.0)[:, None]
            outside = norms > limit
            if outside.any():
                logger.warning("clamped %d projected query coordinate(s) onto their hashing balls", int(outside.sum()))
                scale = np.where(outside, limit / np.maximum(norms, 1e-300), 1.0)
                disk = disk * scale[..., None]
        return paired_labels(t, theta, disk)

    def keys(self, pts: ArrayLike, clamp: bool = False) -> list[list[bytes]]:
        """``keys[l][i]``: packed key of point ``i`` in table ``l``."""
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        K = self.params.K
        return [
            _pack(self._labels(pts, slice(ell * K, (ell + 1) * K), clamp=clamp).T)
            for ell in range(self.params.L)
        ]

    # -- queries --------------------------------------------------------

    def distance(self, q: ArrayLike, ids) -> NDArray[np.float64]:
        q = np.asarray(q, dtype=np.float64)
        others = self.points[np.asarray(ids, dtype=np.int64)]
        if self.model == "ball":
            return np.atleast_1d(distance_poincare(others, q))
        return np.atleast_1d(distance_halfspace(others, q))

    def _check_query(self, q: ArrayLike) -> NDArray[np.float64]:
        q = np.asarray(q, dtype=np.float64)
        if q.shape != (self.dim,):
            raise DomainError(f"query has shape {q.shape}, index stores {self.dim}-dimensional points")
        _validate_points(q[None, :], self.model)
        return q

    def candidates(self, q: ArrayLike, budget: int | None = None) -> list[int]:
        """Distinct ids from ``q``'s buckets, table by table, at most ``budget`` of them."""
        q = self._check_query(q)
        if budget is None:
            budget = 3 * self.params.L
        if budget < 1:
            raise DomainError("budget must be positive")
        out: list[int] = []
        seen: set[int] = set()
        if not len(self.points):
            return out
        for ell, key in enumerate(row[0] for row in self.keys(q, clamp=True)):
            for pid in self.tables[ell].get(key, ()):
                if pid not in seen:
                    seen.add(pid)
                    out.append(pid)
                    if len(out) >= budget:
                        return out
        return out

    def query(self, q: ArrayLike, budget: int | None = None) -> tuple[int, float] | None:
        """Nearest examined candidate within ``c r`` of ``q`` as ``(id, distance)``, else ``None``.

        Ties go to the smaller id.
        """
        cands = self.candidates(q, budget)
        if not cands:
            return None
        ids = np.array(sorted(cands), dtype=np.int64)
        dist = self.distance(q, ids)
        best = int(np.argmin(dist))
        if dist[best] > self.params.c * self.params.r:
            return None
        return int(ids[best]), float(dist[best])

    def n_entries(self) -> int:
        return sum(len(ids) for table in self.tables for ids in table.values())

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        h = self.hashers
        hashers = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in h.items()}
        return {
            "format": "hyperlsh-index",
            "version": FORMAT_VERSION,
            "params": {"K": self.params.K, "L": self.params.L, "r": self.params.r, "c": self.params.c},
            "model": self.model,
            "dim": self.dim,
            "points": self.points.tolist(),
            "hashers": hashers,
            "tables": [
                [[base64.b64encode(key).decode("ascii"), ids] for key, ids in table.items()]
                for table in self.tables
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LshIndex":
        if data.get("format") != "hyperlsh-index":
            raise DomainError("not a hyperlsh index document")
        params = IndexParams(**data["params"])
        hashers = {}
        for k, v in data["hashers"].items():
            hashers[k] = np.asarray(v, dtype=np.float64) if isinstance(v, list) else v
        points = np.asarray(data["points"], dtype=np.float64)
        if points.size == 0:
            points = points.reshape(0, int(data.get("dim", 2)))
        tables = [{base64.b64decode(key): list(ids) for key, ids in table} for table in data["tables"]]
        return cls(params, points, data["model"], hashers, tables)

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "LshIndex":
        return cls.from_dict(json.loads(text))


def brute_force_nn(points: ArrayLike, q: ArrayLike, model: str = "ball") -> tuple[int, float]:
    """Exact nearest neighbor by linear scan; ties go to the smaller id."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[0] == 0 or pts.size == 0:
        raise DomainError("brute-force search needs a nonempty dataset")
    q = np.asarray(q, dtype=np.float64)
    if model == "ball":
        dist = np.atleast_1d(distance_poincare(pts, q))
    elif model == "halfspace":
        dist = np.atleast_1d(distance_halfspace(pts, q))
    else:
        raise DomainError(f"unknown point model {model!r}")
    best = int(np.argmin(dist))
    return best, float(dist[best])
