"""Entropy and relative entropy of positive operators, with truncations.

Operators may be unnormalized.  The entropy used throughout is

    H(A) = Tr A * log(Tr A) - Tr(A log A),

which reduces to the von Neumann entropy for Tr A = 1, and the relative
entropy is the generalized form

    H(A||B) = Tr(A log A - A log B) + (Tr B - Tr A)/ln 2,

returning +inf when the support of A is not contained in the support of B.
Logs are base 2 by default (results in bits); the trailing linear term is
rescaled accordingly so that the value is exactly the natural-log quantity
divided by ln 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, NonState, NotPositive
from .linalg import TOL_HERM, TOL_PSD, TOL_RANK, TOL_TRACE

__all__ = [
    "DensityMatrix",
    "Projector",
    "entropy",
    "relative_entropy",
    "compress",
    "support_projector",
]

# Mass of A tolerated outside the support of B before H(A||B) is declared
# infinite; floating-point eigenbases never align exactly.
TOL_LEAK = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix: Hermitian, PSD, unit trace."""

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @staticmethod
    def validated(
        entries: np.ndarray,
        tol_herm: float = TOL_HERM,
        tol_psd: float = TOL_PSD,
        tol_trace: float = TOL_TRACE,
    ) -> "DensityMatrix":
        a = np.asarray(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NonState(f"expected a square matrix, got shape {a.shape}")
        herm_dev = float(np.abs(a - a.conj().T).max())
        if herm_dev > tol_herm:
            raise NonState(f"not Hermitian: deviation {herm_dev:.3e}")
        vals, _ = linalg.eigh(a)
        if float(vals.min()) < -tol_psd:
            raise NonState(f"negative eigenvalue {vals.min():.3e}")
        tr = float(np.real(np.trace(a)))
        if abs(tr - 1.0) > tol_trace:
            raise NonState(f"trace {tr!r} differs from 1")
        return DensityMatrix(linalg.symmetrize(a))


@dataclass(frozen=True)
class Projector:
    """Orthogonal projector, stored by an orthonormal column basis."""

    dim: int
    basis_columns: np.ndarray  # dim x rank

    @property
    def rank(self) -> int:
        return self.basis_columns.shape[1]

    def matrix(self) -> np.ndarray:
        v = self.basis_columns
        return v @ v.conj().T

    @staticmethod
    def from_columns(columns: np.ndarray, tol: float = 1e-10) -> "Projector":
        v = np.asarray(columns, dtype=complex)
        gram = v.conj().T @ v
        dev = float(np.abs(gram - np.eye(v.shape[1])).max())
        if dev > tol:
            raise ValueError(f"columns not orthonormal: deviation {dev:.3e}")
        return Projector(v.shape[0], v)

    @staticmethod
    def identity(dim: int) -> "Projector":
        return Projector(dim, np.eye(dim, dtype=complex))

    @staticmethod
    def standard_basis(dim: int, indices) -> "Projector":
        return Projector(dim, np.eye(dim, dtype=complex)[:, list(indices)])


def _as_array(a) -> np.ndarray:
    if isinstance(a, DensityMatrix):
        return a.entries
    return np.asarray(a, dtype=complex)


def entropy(a, log_base: float = 2.0, tol_psd: float = TOL_PSD) -> float:
    """Entropy Tr A log Tr A - Tr A log A of a positive operator.

    Eigenvalues at or below TOL_RANK relative to the largest are treated as
    exact zeros (0 log 0 = 0).
    """
    mat = _as_array(a)
    vals, _ = linalg.eigh(mat)
    linalg.check_positive(vals, tol_psd)
    top = float(vals.max(initial=0.0))
    if top <= 0.0:
        return 0.0
    pos = vals[vals > TOL_RANK * top]
    tr = float(vals.sum())
    log = np.log2 if log_base == 2.0 else (lambda x: np.log(x) / math.log(log_base))
    return float(tr * log(tr) - np.sum(pos * log(pos)))


def relative_entropy(
    a,
    b,
    log_base: float = 2.0,
    tol_psd: float = TOL_PSD,
    tol_rank: float = TOL_RANK,
    tol_leak: float = TOL_LEAK,
) -> float:
    """Generalized relative entropy H(A||B); +inf off the support of B.

    Support containment is decided numerically: eigenvalues of B above
    tol_rank * lambda_max(B) span its support, and up to tol_leak of the
    mass of A may leak outside (it is projected away).
    """
    amat = _as_array(a)
    bmat = _as_array(b)
    if amat.shape != bmat.shape:
        raise DimensionMismatch(f"shapes {amat.shape} and {bmat.shape}")

    avals, _ = linalg.eigh(amat)
    linalg.check_positive(avals, tol_psd)
    bvals, bvecs = linalg.eigh(bmat)
    linalg.check_positive(bvals, tol_psd)

    ln_base = math.log(log_base)
    atop = float(avals.max(initial=0.0))
    tr_a = float(avals.sum())
    tr_b = float(bvals.sum())
    if atop <= 0.0:
        return tr_b / ln_base

    # Tr A log A from the spectrum of A.
    apos = avals[avals > TOL_RANK * atop]
    tr_a_log_a = float(np.sum(apos * np.log(apos))) / ln_base

    # Diagonal of A in the eigenbasis of B; mass on B's numerical kernel.
    btop = float(bvals.max(initial=0.0))
    if btop <= 0.0:
        return math.inf
    keep = bvals > tol_rank * btop
    diag_a = np.real(np.einsum("ij,jk,ki->i", bvecs.conj().T, amat, bvecs))
    diag_a = np.clip(diag_a, 0.0, None)
    leak = float(diag_a[~keep].sum())
    if leak > tol_leak:
        return math.inf

    tr_a_log_b = float(np.sum(diag_a[keep] * np.log(bvals[keep]))) / ln_base
    return tr_a_log_a - tr_a_log_b + (tr_b - tr_a) / ln_base


def compress(a, p: Projector):
    """Restrict A to the range of P: the rank(P)-dimensional operator V^dag A V."""
    mat = _as_array(a)
    if mat.shape[0] != p.dim:
        raise DimensionMismatch(f"operator dim {mat.shape[0]} vs projector dim {p.dim}")
    v = p.basis_columns
    return linalg.symmetrize(v.conj().T @ mat @ v)


def support_projector(a, tol_rank: float = TOL_RANK) -> Projector:
    """Projector onto the span of eigenvectors with eigenvalue > tol_rank * lambda_max."""
    mat = _as_array(a)
    vals, vecs = linalg.eigh(mat)
    linalg.check_positive(vals)
    top = float(vals.max(initial=0.0))
    if top <= 0.0:
        return Projector(mat.shape[0], np.zeros((mat.shape[0], 0), dtype=complex))
    keep = vals > tol_rank * top
    return Projector(mat.shape[0], vecs[:, keep])
