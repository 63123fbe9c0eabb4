"""Numerical invariant suites behind ``hyperlsh validate``.

Every suite returns a list of :class:`Check` results on fixed grids and
fixed seeds, so repeated runs give identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .dimreduce import alpha_constant, alpha_terms, check_f_stretch
from .geodesic_hash import separation_measure_quadrature
from .geometry import distance_halfspace
from .lowerbound import puiseux_sandwich, verify_cube
from .lsh2d import log_ratio, rho_exact, separation_scale
from .lsh_hd import estimate_collision_hd

SUITES = ("integral", "log-ratio", "monotone-g", "lemma-f", "puiseux", "sandwich", "stability", "alpha")
GRID_POINTS = 1000
VALIDATION_SEED = 20240601


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def check_integral(radii=(0.01, 0.1, 0.5, 1.0, 2.0, 5.0), tol: float = 1e-8) -> list[Check]:
    out = []
    for r in radii:
        err = abs(separation_measure_quadrature(r) - 2.0 * r)
        out.append(Check(f"integral r={r:g}", err <= tol, f"|quad - 2r| = {err:.3e}"))
    return out


def check_log_ratio(ells=(1.1, 2.0, 5.0, 10.0), n: int = GRID_POINTS) -> list[Check]:
    out = []
    for ell in ells:
        x = np.linspace(0.0, 0.99 / ell, n + 1)[1:]
        excess = float(np.max(log_ratio(x, ell) - 1.0 / ell))
        out.append(Check(f"log-ratio ell={ell:g}", excess <= 1e-12, f"max(ratio - 1/ell) = {excess:.3e}"))
    return out


def check_monotone_g(cs=(1.5, 2.0, 4.0), R: float = 3.0, n: int = GRID_POINTS) -> list[Check]:
    out = []
    k = 1.0 / separation_scale(R)
    for c in cs:
        r = np.linspace(1e-3, 0.99 / (c * k), n)
        g = np.array([rho_exact(x, c, R) for x in r])
        worst = float(np.max(np.diff(g)))
        out.append(Check(f"monotone-g c={c:g}", worst < 0, f"largest step {worst:.3e}"))
    return out


def check_lemma_f(n: int = 100_000, seed: int = VALIDATION_SEED) -> list[Check]:
    rng = np.random.default_rng(seed)
    z1 = rng.uniform(0.01, 10.0, n)
    z2 = rng.uniform(0.01, 10.0, n)
    r = rng.uniform(0.0, 10.0, n)
    out = []
    for label, gamma in (("gamma>=1", rng.uniform(1.0, 10.0, n)), ("gamma<=1", rng.uniform(0.0, 1.0, n))):
        ok = check_f_stretch(z1, z2, r, gamma)
        bad = int(np.count_nonzero(~ok))
        out.append(Check(f"lemma-f {label}", bad == 0, f"{n - bad}/{n} tuples hold"))
    return out


def check_puiseux(n: int = GRID_POINTS) -> list[Check]:
    x = np.linspace(0.0, 1.0, n + 2)[1:-1]
    lower, mid, upper = puiseux_sandwich(x)
    ok = (lower <= mid) & (mid <= upper)
    bad = int(np.count_nonzero(~ok))
    return [Check("puiseux ordering", bad == 0, f"{n - bad}/{n} grid points ordered")]


def check_sandwich(d: int = 8, epsilons=(0.1, 0.5, 0.9)) -> list[Check]:
    out = []
    for eps in epsilons:
        passed, total = verify_cube(d, eps)
        out.append(Check(f"sandwich d={d} eps={eps:g}", passed == total, f"{passed}/{total} pairs"))
    return out


def _box_pair(rng: np.random.Generator, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Two half-space points with heights in [0.7, 1.4] and boundary norm at most 0.6."""
    pts = []
    for _ in range(2):
        x = rng.standard_normal(d - 1)
        x *= rng.uniform(0.0, 0.6) / np.linalg.norm(x)
        pts.append(np.concatenate(([rng.uniform(0.7, 1.4)], x)))
    return pts[0], pts[1]


def check_stability(
    d: int = 10,
    samples: int = 100_000,
    n_pairs: int = 4,
    sampler_R: float = 3.0,
    ks_limit: float = 0.005,
    seed: int = VALIDATION_SEED,
) -> list[Check]:
    """Gaussian 2-stability (KS test) and the collision-probability band in H^d."""
    rng = np.random.default_rng(seed)
    out = []
    p, q = _box_pair(rng, d)
    diff = p[1:] - q[1:]
    a = rng.standard_normal((samples, d - 1))
    ks = stats.kstest(np.abs(a @ diff), stats.halfnorm(scale=float(np.linalg.norm(diff))).cdf).statistic
    out.append(Check("stability 2-stable projection", ks < ks_limit, f"KS = {ks:.5f} (limit {ks_limit})"))

    w = separation_scale(sampler_R)
    alpha = alpha_constant()
    for i in range(n_pairs):
        p, q = _box_pair(rng, d)
        r = float(distance_halfspace(p, q))
        lo, hi = 1.0 - r / w, 1.0 - alpha * r / w
        p_hat = estimate_collision_hd(p, q, sampler_R, samples, rng)
        slack = 3.0 * math.sqrt(max(p_hat * (1.0 - p_hat), 1e-12) / samples)
        ok = lo - slack <= p_hat <= hi + slack
        out.append(
            Check(f"stability band pair {i} r={r:.4f}", ok, f"p_hat={p_hat:.5f} in [{lo:.5f}, {hi:.5f}] +/- {slack:.5f}")
        )
    return out


def check_alpha() -> list[Check]:
    first, second = alpha_terms()
    alpha = alpha_constant()
    return [
        Check("alpha value", 0.631 < alpha < 0.632, f"alpha = {alpha:.7f} ({first:.7f} + {second:.7f})"),
        Check("alpha inverse", 1.0 / alpha <= 1.59, f"1/alpha = {1.0 / alpha:.6f}"),
    ]


_RUNNERS = {
    "integral": check_integral,
    "log-ratio": check_log_ratio,
    "monotone-g": check_monotone_g,
    "lemma-f": check_lemma_f,
    "puiseux": check_puiseux,
    "sandwich": check_sandwich,
    "stability": check_stability,
    "alpha": check_alpha,
}


def run_suite(name: str) -> list[Check]:
    try:
        runner = _RUNNERS[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return runner()
