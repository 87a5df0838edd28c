"""Channels in Kraus form, with classical stochastic channels as a special case.

Classical channels use the column-stochastic convention: states are column
vectors of probabilities, output_j = sum_i T[j, i] * input_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .density import DensityMatrix, entropy, _as_array
from .errors import DimensionMismatch, NotStochastic, NotTracePreserving

__all__ = [
    "Channel",
    "apply",
    "classical_channel",
    "identity_channel",
    "depolarizing_channel",
    "validate_channel",
    "output_entropy",
]

TOL_TP = 1e-9


@dataclass(frozen=True)
class Channel:
    """Completely positive trace-preserving map, stored by its Kraus operators."""

    dim_in: int
    dim_out: int
    kraus: tuple
    kind: str = "general"  # "general" or "classical"
    validated: bool = field(default=False, compare=False)

    def stochastic_matrix(self) -> np.ndarray:
        """Column-stochastic transition matrix of a classical channel."""
        if self.kind != "classical":
            raise ValueError("not a classical channel")
        t = np.zeros((self.dim_out, self.dim_in))
        for k in self.kraus:
            t += np.abs(np.asarray(k)) ** 2
        return t


def apply(phi: Channel, rho) -> np.ndarray:
    """Forward application sum_k K_k rho K_k^dag."""
    mat = _as_array(rho)
    if mat.shape[0] != phi.dim_in:
        raise DimensionMismatch(f"state dim {mat.shape[0]} vs channel input dim {phi.dim_in}")
    out = np.zeros((phi.dim_out, phi.dim_out), dtype=complex)
    for k in phi.kraus:
        out += k @ mat @ k.conj().T
    return linalg.symmetrize(out)


def classical_channel(t: np.ndarray, tol: float = 1e-9) -> Channel:
    """Channel built from a column-stochastic matrix T.

    Kraus set {sqrt(T[j,i]) |j><i|}; on diagonal states it acts as p -> T p.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim != 2:
        raise NotStochastic(f"expected a matrix, got shape {t.shape}")
    if t.min() < -tol:
        raise NotStochastic(f"negative entry {t.min():.3e}")
    colsums = t.sum(axis=0)
    dev = float(np.abs(colsums - 1.0).max())
    if dev > tol:
        raise NotStochastic(f"column sums deviate from 1 by {dev:.3e}")
    dim_out, dim_in = t.shape
    kraus = []
    for j in range(dim_out):
        for i in range(dim_in):
            if t[j, i] > 0.0:
                k = np.zeros((dim_out, dim_in), dtype=complex)
                k[j, i] = np.sqrt(t[j, i])
                kraus.append(k)
    return validate_channel(Channel(dim_in, dim_out, tuple(kraus), kind="classical"))


def identity_channel(dim: int) -> Channel:
    """The noiseless channel on a dim-dimensional space."""
    return validate_channel(
        Channel(dim, dim, (np.eye(dim, dtype=complex),), kind="classical")
    )


def depolarizing_channel(dim: int, p: float = 1.0) -> Channel:
    """Mix the input with the maximally mixed state: rho -> (1-p) rho + p I/d.

    Kraus operators are the discrete Weyl (shift/clock) unitaries.
    """
    omega = np.exp(2j * np.pi / dim)
    shift = np.roll(np.eye(dim, dtype=complex), 1, axis=0)
    clock = np.diag(omega ** np.arange(dim))
    kraus = []
    for a in range(dim):
        for b in range(dim):
            w = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            if a == 0 and b == 0:
                kraus.append(np.sqrt(1.0 - p + p / dim**2) * w)
            else:
                kraus.append(np.sqrt(p) / dim * w)
    return validate_channel(Channel(dim, dim, tuple(kraus)))


def validate_channel(phi: Channel, tol_tp: float = TOL_TP) -> Channel:
    """Check the Kraus completeness relation and return a validated copy."""
    acc = np.zeros((phi.dim_in, phi.dim_in), dtype=complex)
    for k in phi.kraus:
        k = np.asarray(k, dtype=complex)
        if k.shape != (phi.dim_out, phi.dim_in):
            raise DimensionMismatch(
                f"Kraus shape {k.shape}, expected {(phi.dim_out, phi.dim_in)}"
            )
        acc += k.conj().T @ k
    dev = float(np.abs(acc - np.eye(phi.dim_in)).max())
    if dev > tol_tp:
        raise NotTracePreserving(dev)
    return Channel(
        phi.dim_in,
        phi.dim_out,
        tuple(np.asarray(k, dtype=complex) for k in phi.kraus),
        kind=phi.kind,
        validated=True,
    )


def output_entropy(phi: Channel, rho, log_base: float = 2.0) -> float:
    """Entropy of the channel output."""
    return entropy(apply(phi, rho), log_base=log_base)
