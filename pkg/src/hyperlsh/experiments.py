"""Synthetic data and empirical p1 / p2 / rho measurements.

Datasets are drawn uniformly with respect to hyperbolic volume inside a ball
of radius ``R_hyp`` and returned in Poincare-ball coordinates.  Collision
rates are estimated by drawing ``reps`` hash functions, labelling every
point, and counting for each unordered pair how many of them separate it.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .geodesic_hash import KinematicSampler, hash_labels
from .geometry import DomainError, pairwise_distances_poincare, poincare_to_halfspace
from .lsh_hd import sample_hd_labels

CSV_COLUMNS = (
    "d", "n", "R_hyp", "r", "c", "p1_hat", "p2_hat", "rho_hat",
    "one_over_c", "n_near", "n_far", "seed",
)
DEFAULT_REPS = 1000
BISECTION_TOL = 1e-10

_GRID_SIZE = 2048
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)
_LABEL_CHUNK = 4096


class InsufficientPairs(DomainError):
    """No pair of points falls in one of the near/far classes."""

    def __init__(self, c: float, n_near: int, n_far: int) -> None:
        super().__init__(f"insufficient pairs at c={c}: {n_near} near, {n_far} far")
        self.c = c
        self.n_near = n_near
        self.n_far = n_far


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    n: int
    R_hyp: float
    r: float
    c_grid: tuple[float, ...]
    reps: int = DEFAULT_REPS
    seed: int = 0

    def __post_init__(self) -> None:
        grid = tuple(float(c) for c in self.c_grid)
        if self.d < 2:
            raise DomainError("d must be >= 2")
        if self.n < 1 or self.reps < 1:
            raise DomainError("n and reps must be positive")
        if not (self.R_hyp > 0 and self.r > 0):
            raise DomainError("R_hyp and r must be positive")
        if any(c <= 1 for c in grid) or list(grid) != sorted(grid):
            raise DomainError("c_grid must be ascending with every c > 1")
        object.__setattr__(self, "c_grid", grid)


@dataclass(frozen=True)
class RhoEstimate:
    c: float
    p1_hat: float
    p2_hat: float
    rho_hat: float
    n_near_pairs: int
    n_far_pairs: int
    # binomial-style standard errors over reps, for diagnostics only
    p1_se: float = field(default=float("nan"), compare=False)
    p2_se: float = field(default=float("nan"), compare=False)


def rho_from_probabilities(p1: float, p2: float) -> float:
    """``ln(1/p1) / ln(1/p2)``; 0 when ``p1 == 1``, ``nan`` when undefined."""
    if p1 >= 1.0:
        return 0.0
    if p2 <= 0.0:
        return 0.0
    if p2 >= 1.0 or p1 <= 0.0:
        return float("nan")
    return math.log(p1) / math.log(p2)


# -- sampling ---------------------------------------------------------------

def _log_sinh(t: NDArray[np.float64]) -> NDArray[np.float64]:
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore", over="ignore"):
        small = np.log(np.sinh(np.minimum(t, 20.0)))
        large = t + np.log1p(-np.exp(-2.0 * t)) - math.log(2.0)
    return np.where(t < 20.0, small, large)


class RadialLaw:
    """Radius law with density proportional to ``sinh(t)^(d-1)`` on ``[0, R]``.

    The density is evaluated relative to its value at ``R`` (log space), the
    CDF is tabulated with Gauss-Legendre panels and inverted by bisection.
    """

    def __init__(self, d: int, R: float, grid_size: int = _GRID_SIZE) -> None:
        self.d = d
        self.R = float(R)
        self._log_top = _log_sinh(np.array(self.R))
        self.knots = np.linspace(0.0, self.R, grid_size + 1)
        panels = self._panel_integrals(self.knots[:-1], self.knots[1:])
        cum = np.concatenate(([0.0], np.cumsum(panels)))
        self.total = cum[-1]
        self.cum = cum / self.total

    def density(self, t):
        """Unnormalized density ``(sinh t / sinh R)^(d-1)``."""
        return np.exp((self.d - 1) * (_log_sinh(t) - self._log_top))

    def _panel_integrals(self, lo, hi):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        nodes = mid[..., None] + half[..., None] * _GL_NODES
        return half * (self.density(nodes) @ _GL_WEIGHTS)

    def cdf(self, t):
        t = np.clip(np.asarray(t, dtype=np.float64), 0.0, self.R)
        k = np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, len(self.knots) - 2)
        return self.cum[k] + self._panel_integrals(self.knots[k], t) / self.total

    def ppf(self, u):
        """Inverse CDF by bisection inside the bracketing panel, to ``1e-10``."""
        u = np.asarray(u, dtype=np.float64)
        k = np.clip(np.searchsorted(self.cum, u, side="right") - 1, 0, len(self.knots) - 2)
        lo = self.knots[k].copy()
        hi = self.knots[k + 1].copy()
        while np.max(hi - lo, initial=0.0) > BISECTION_TOL:
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)


def sample_uniform_ball(d: int, R_hyp: float, n: int, rng: np.random.Generator) -> NDArray[np.float64]:
    """``n`` points uniform w.r.t. hyperbolic volume in ``B(0, R_hyp)`` of H^d.

    Returned in Poincare-ball coordinates, shape ``(n, d)``.
    """
    if d < 2:
        raise DomainError("d must be >= 2")
    if not R_hyp > 0:
        raise DomainError("R_hyp must be positive")
    direction = rng.standard_normal((n, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radii = RadialLaw(d, R_hyp).ppf(rng.random(n))
    return direction * np.tanh(radii / 2.0)[:, None]


# -- collision counting -----------------------------------------------------

def _label_chunks(points: NDArray[np.float64], R: float, reps: int, rng: np.random.Generator):
    d = points.shape[1]
    if d == 2:
        sampler = KinematicSampler(R)
    else:
        halfspace = poincare_to_halfspace(points)
    remaining = reps
    while remaining:
        m = min(remaining, _LABEL_CHUNK)
        if d == 2:
            t, theta = sampler.sample_many(rng, m)
            yield hash_labels(t, theta, points)
        else:
            yield sample_hd_labels(halfspace, m, rng, floor_R=R)
        remaining -= m


def separation_counts(points: ArrayLike, R: float, reps: int, rng: np.random.Generator) -> NDArray[np.int64]:
    """``(n, n)`` matrix: how many of ``reps`` random hashes separate each pair.

    For ``d == 2`` the hashes are geodesics of ``B(0, R)``.  For ``d >= 3``
    each hash projects with a fresh Gaussian direction and samples its
    geodesic from a ball that covers all projected points (radius at least
    ``R``).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = pts.shape[0]
    agree = np.zeros((n, n), dtype=np.float64)
    for labels in _label_chunks(pts, R, reps, rng):
        s = labels.astype(np.float32)
        # chunk sums are integers below 2**24, exact in float32
        agree += (s.T @ s).astype(np.float64)
    return np.rint((reps - agree) / 2.0).astype(np.int64)


@dataclass
class PairStatistics:
    """Distances and separation counts of all unordered pairs of a dataset."""

    distances: NDArray[np.float64]
    separations: NDArray[np.int64]
    reps: int

    @classmethod
    def measure(cls, points: ArrayLike, R: float, reps: int, rng: np.random.Generator) -> "PairStatistics":
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        iu = np.triu_indices(pts.shape[0], k=1)
        dist = pairwise_distances_poincare(pts)[iu]
        seps = separation_counts(pts, R, reps, rng)[iu]
        return cls(dist, seps, reps)

    def collision_rate(self, mask: NDArray[np.bool_]) -> tuple[float, float]:
        """Mean collision rate over the selected pairs and its standard error.

        The error treats reps as independent but ignores correlation between
        pairs, so it is only indicative.
        """
        count = int(mask.sum())
        if count == 0:
            return float("nan"), float("nan")
        sep_rate = self.separations[mask].sum() / (count * self.reps)
        p = 1.0 - sep_rate
        return float(p), math.sqrt(max(p * (1.0 - p), 0.0) / self.reps)

    def estimate(self, c: float, near: NDArray[np.bool_], far: NDArray[np.bool_]) -> RhoEstimate:
        n_near, n_far = int(near.sum()), int(far.sum())
        if n_near == 0 or n_far == 0:
            raise InsufficientPairs(c, n_near, n_far)
        p1, se1 = self.collision_rate(near)
        p2, se2 = self.collision_rate(far)
        return RhoEstimate(c, p1, p2, rho_from_probabilities(p1, p2), n_near, n_far, se1, se2)

    def threshold_estimate(self, r: float, c: float) -> RhoEstimate:
        return self.estimate(c, self.distances <= r, self.distances >= c * r)

    def boundary_estimate(self, r: float, c: float) -> RhoEstimate:
        dist = self.distances
        near = (dist >= 0.9 * r) & (dist <= r)
        far = (dist >= c * r) & (dist <= 1.1 * c * r)
        return self.estimate(c, near, far)


def _check_inputs(r: float, c: float, R: float, reps: int) -> None:
    if not r > 0 or not R > 0:
        raise DomainError("r and R must be positive")
    if not c > 1:
        raise DomainError("c must exceed 1")
    if reps < 1:
        raise DomainError("reps must be positive")


def estimate_p1_p2(points, r: float, c: float, R: float, reps: int, rng: np.random.Generator) -> RhoEstimate:
    """Empirical ``p1`` over pairs within ``r`` and ``p2`` over pairs beyond ``c r``."""
    _check_inputs(r, c, R, reps)
    stats = PairStatistics.measure(points, R, reps, rng)
    return stats.threshold_estimate(r, c)


def boundary_pair_experiment(points, r: float, c: float, R: float, reps: int, rng: np.random.Generator) -> RhoEstimate:
    """As :func:`estimate_p1_p2` but only for pairs in ``[0.9r, r]`` and ``[cr, 1.1cr]``."""
    _check_inputs(r, c, R, reps)
    stats = PairStatistics.measure(points, R, reps, rng)
    return stats.boundary_estimate(r, c)


def split_seed(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    data_ss, hash_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(data_ss), np.random.default_rng(hash_ss)


def generate_dataset(config: ExperimentConfig) -> NDArray[np.float64]:
    data_rng, _ = split_seed(config.seed)
    return sample_uniform_ball(config.d, config.R_hyp, config.n, data_rng)


def rho_curve(config: ExperimentConfig, boundary: bool = False, points=None) -> list[RhoEstimate | InsufficientPairs]:
    """One estimate per ``c`` in ``config.c_grid``.

    All values of ``c`` share the same dataset and hash draws.  A ``c`` whose
    near or far class is empty yields the :class:`InsufficientPairs` error
    in its slot instead of an estimate.
    """
    data_rng, hash_rng = split_seed(config.seed)
    if points is None:
        points = sample_uniform_ball(config.d, config.R_hyp, config.n, data_rng)
    stats = PairStatistics.measure(points, config.R_hyp, config.reps, hash_rng)
    out: list[RhoEstimate | InsufficientPairs] = []
    for c in config.c_grid:
        try:
            if boundary:
                out.append(stats.boundary_estimate(config.r, c))
            else:
                out.append(stats.threshold_estimate(config.r, c))
        except InsufficientPairs as exc:
            out.append(exc)
    return out


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_rows(config: ExperimentConfig, results, n_points: int | None = None) -> list[list[str]]:
    """CSV rows (header first).  Rows for insufficient classes carry ``nan``."""
    rows = [list(CSV_COLUMNS)]
    n = config.n if n_points is None else n_points
    for c, res in zip(config.c_grid, results):
        if isinstance(res, RhoEstimate):
            vals = (res.p1_hat, res.p2_hat, res.rho_hat, res.n_near_pairs, res.n_far_pairs)
        else:
            vals = (float("nan"), float("nan"), float("nan"), res.n_near, res.n_far)
        row = (config.d, n, float(config.R_hyp), float(config.r), float(c), *vals[:3], 1.0 / c, *vals[3:], config.seed)
        rows.append([_fmt(v) for v in row])
    return rows


def to_csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()
