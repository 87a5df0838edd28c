"""Seeded generators for random states, ensembles and channels."""

from __future__ import annotations

import numpy as np

from .channel import Channel, validate_channel
from .ensemble import Ensemble

__all__ = [
    "random_pure_state",
    "random_state",
    "random_ensemble",
    "random_stochastic_matrix",
    "random_channel",
]


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state as a rank-1 density matrix."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_state(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random full-rank (or fixed-rank) density matrix from the Ginibre ensemble."""
    k = rank if rank is not None else dim
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    rho = g @ g.conj().T
    return rho / np.real(np.trace(rho))


def random_ensemble(
    dim: int, n_atoms: int, rng: np.random.Generator, pure: bool = False
) -> Ensemble:
    w = rng.dirichlet(np.ones(n_atoms))
    make = random_pure_state if pure else random_state
    return Ensemble(w, tuple(make(dim, rng) for _ in range(n_atoms)))


def random_stochastic_matrix(dim_out: int, dim_in: int, rng: np.random.Generator) -> np.ndarray:
    """Column-stochastic matrix with Dirichlet-distributed columns."""
    return rng.dirichlet(np.ones(dim_out), size=dim_in).T


def random_channel(
    dim_in: int, dim_out: int, rng: np.random.Generator, env_dim: int | None = None
) -> Channel:
    """Random channel from a Haar-ish random isometry into output x environment."""
    k = env_dim if env_dim is not None else dim_in
    g = rng.standard_normal((dim_out * k, dim_in)) + 1j * rng.standard_normal(
        (dim_out * k, dim_in)
    )
    v, _ = np.linalg.qr(g)  # isometry: v^dag v = I
    kraus = tuple(v[e * dim_out : (e + 1) * dim_out, :] for e in range(k))
    return validate_channel(Channel(dim_in, dim_out, kraus))
