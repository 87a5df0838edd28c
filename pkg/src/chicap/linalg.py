"""Spectral primitives.

Every matrix function in the package goes through :func:`eigh` so that all
logs, supports and projections share one numerical treatment.  Inputs are
symmetrized before decomposition to suppress round-off drift.
"""

from __future__ import annotations

import numpy as np

from .errors import NotPositive

TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_TRACE = 1e-9
TOL_RANK = 1e-12


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return (A + A^dag)/2 as a complex array."""
    a = np.asarray(a, dtype=complex)
    return 0.5 * (a + a.conj().T)


def eigh(a: np.ndarray):
    """Eigendecomposition of a Hermitian matrix after symmetrization.

    Returns (eigenvalues ascending, eigenvector columns).
    """
    return np.linalg.eigh(symmetrize(a))


def check_positive(eigenvalues: np.ndarray, tol_psd: float = TOL_PSD) -> None:
    """Raise NotPositive if any eigenvalue is below -tol_psd."""
    lo = float(eigenvalues.min()) if eigenvalues.size else 0.0
    if lo < -tol_psd:
        raise NotPositive(f"minimal eigenvalue {lo:.3e} < -{tol_psd:.1e}")


def trace_norm(a: np.ndarray) -> float:
    """Trace norm ||A||_1 of a Hermitian matrix."""
    vals, _ = eigh(a)
    return float(np.abs(vals).sum())
