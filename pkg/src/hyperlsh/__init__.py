"""Locality-sensitive hashing in hyperbolic space."""

from .ann_index import LshIndex, brute_force_nn, choose_params
from .geodesic_hash import Geodesic, KinematicSampler, sample_geodesic
from .geometry import DomainError
from .lsh2d import collision_probability, rho_bound, rho_exact

__all__ = [
    "DomainError",
    "Geodesic",
    "KinematicSampler",
    "LshIndex",
    "brute_force_nn",
    "choose_params",
    "collision_probability",
    "rho_bound",
    "rho_exact",
    "sample_geodesic",
]

__version__ = "0.1.0"
