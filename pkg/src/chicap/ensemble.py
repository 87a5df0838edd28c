"""Finite-support ensembles of states and the chi functional.

An Ensemble is a finite probability measure on state space (weights plus
density matrices).  SampledMeasure is the same structure used as a
high-resolution stand-in for a general Borel measure; :func:`discretize`
reduces it to a small ensemble with the same barycenter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .channel import Channel, apply
from .density import (
    DensityMatrix,
    Projector,
    _as_array,
    compress,
    entropy,
    relative_entropy,
)
from .errors import DimensionMismatch, EmptyEnsemble, InvalidResolution

__all__ = [
    "Ensemble",
    "SampledMeasure",
    "barycenter",
    "chi",
    "chi_truncated",
    "chi_truncated_expanded",
    "donald_residual",
    "purify_ensemble",
    "discretize",
]

# Output atoms lighter than this are dropped (mass renormalized away).
WEIGHT_PRUNE = 1e-15


@dataclass(frozen=True)
class Ensemble:
    """Finite-support probability measure on density matrices."""

    weights: np.ndarray
    states: tuple  # density matrices as complex arrays, equal dims

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(
            self, "states", tuple(_as_array(s) for s in self.states)
        )
        if len(self.states) == 0:
            raise EmptyEnsemble("ensemble has no atoms")
        if len(self.states) != len(self.weights):
            raise ValueError("weights and states have different lengths")
        if self.weights.min() <= 0.0:
            raise ValueError(f"nonpositive weight {self.weights.min()!r}")
        dev = abs(float(self.weights.sum()) - 1.0)
        if dev > 1e-12:
            raise ValueError(f"weights sum deviates from 1 by {dev:.3e}")
        dims = {s.shape[0] for s in self.states}
        if len(dims) != 1:
            raise DimensionMismatch(f"mixed state dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def __len__(self) -> int:
        return len(self.states)


# A sampled measure shares the representation; the distinction is intent
# (possibly thousands of atoms standing in for a non-atomic measure).
SampledMeasure = Ensemble


def barycenter(pi: Ensemble) -> np.ndarray:
    """Average state sum_i w_i rho_i."""
    acc = np.zeros((pi.dim, pi.dim), dtype=complex)
    for w, s in zip(pi.weights, pi.states):
        acc += w * s
    return linalg.symmetrize(acc)


def chi(phi: Channel, pi: Ensemble, log_base: float = 2.0) -> float:
    """Holevo chi of the ensemble: sum_i w_i H(Phi(rho_i) || Phi(rho_bar)).

    When the output entropy of the average is finite this also equals
    H(Phi(rho_bar)) - sum_i w_i H(Phi(rho_i)); both forms are computed and
    their agreement within 1e-9 is asserted.
    """
    avg_out = apply(phi, barycenter(pi))
    outs = [apply(phi, s) for s in pi.states]
    rel_form = float(
        sum(
            w * relative_entropy(o, avg_out, log_base=log_base)
            for w, o in zip(pi.weights, outs)
        )
    )
    if math.isfinite(rel_form):
        ent_form = entropy(avg_out, log_base=log_base) - float(
            sum(w * entropy(o, log_base=log_base) for w, o in zip(pi.weights, outs))
        )
        assert abs(rel_form - ent_form) <= 1e-9, (
            f"chi forms disagree: {rel_form!r} vs {ent_form!r}"
        )
    return rel_form


def chi_truncated(
    phi: Channel, pi: Ensemble, p: Projector, log_base: float = 2.0
) -> float:
    """Chi evaluated on outputs compressed by the projector P.

    Uses the generalized (unnormalized) relative entropy of the compressed
    operators; agreement with the expanded four-term form is asserted.
    """
    value = _chi_truncated_rel(phi, pi, p, log_base)
    expanded = chi_truncated_expanded(phi, pi, p, log_base)
    assert abs(value - expanded) <= 1e-9, (
        f"truncated chi forms disagree: {value!r} vs {expanded!r}"
    )
    return value


def _chi_truncated_rel(phi, pi, p, log_base):
    avg_out = compress(apply(phi, barycenter(pi)), p)
    total = 0.0
    for w, s in zip(pi.weights, pi.states):
        total += w * relative_entropy(
            compress(apply(phi, s), p), avg_out, log_base=log_base
        )
    return float(total)


def chi_truncated_expanded(
    phi: Channel, pi: Ensemble, p: Projector, log_base: float = 2.0
) -> float:
    """Four-term algebraic form of the truncated chi.

    H(P Phi(rho_bar) P) - Tr(P Phi(rho_bar)) log Tr(P Phi(rho_bar))
    - sum_i w_i [ H(P Phi(rho_i) P) - Tr(P Phi(rho_i)) log Tr(P Phi(rho_i)) ].
    """
    log = (lambda x: math.log(x, log_base)) if log_base != 2.0 else math.log2

    def xlogx(x: float) -> float:
        return x * log(x) if x > 0.0 else 0.0

    avg = compress(apply(phi, barycenter(pi)), p)
    tr_avg = float(np.real(np.trace(avg)))
    total = entropy(avg, log_base=log_base) - xlogx(tr_avg)
    for w, s in zip(pi.weights, pi.states):
        out = compress(apply(phi, s), p)
        tr = float(np.real(np.trace(out)))
        total -= w * (entropy(out, log_base=log_base) - xlogx(tr))
    return float(total)


def donald_residual(
    pi: Ensemble, sigma, phi: Channel | None = None, log_base: float = 2.0
) -> float:
    """Absolute residual of the ensemble relative-entropy decomposition

    sum_i w_i H(rho_i||sigma) = sum_i w_i H(rho_i||rho_bar) + H(rho_bar||sigma)

    (Donald's identity).  With a channel given, all states are first passed
    through it.  Returns +inf consistently when either side is infinite on
    its own.
    """
    sig = _as_array(sigma)
    if phi is not None:
        states = [apply(phi, s) for s in pi.states]
        sig = apply(phi, sig)
    else:
        states = list(pi.states)
    avg = np.zeros_like(states[0])
    for w, s in zip(pi.weights, states):
        avg += w * s
    lhs = sum(
        w * relative_entropy(s, sig, log_base=log_base)
        for w, s in zip(pi.weights, states)
    )
    rhs = sum(
        w * relative_entropy(s, avg, log_base=log_base)
        for w, s in zip(pi.weights, states)
    ) + relative_entropy(avg, sig, log_base=log_base)
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        return 0.0 if lhs == rhs else math.inf
    return abs(float(lhs) - float(rhs))


def purify_ensemble(pi: Ensemble) -> Ensemble:
    """Split every state into its spectral atoms of pure states.

    The barycenter is unchanged (no renormalization); eigenvalues are sorted
    descending and spectral weight below 1e-14 of the top eigenvalue is
    dropped.  Degenerate eigenbases are resolved by the spectral primitive
    (non-unique, chi-invariant).
    """
    weights, states = [], []
    for w, s in zip(pi.weights, pi.states):
        vals, vecs = linalg.eigh(s)
        order = np.argsort(vals)[::-1]
        top = float(vals[order[0]])
        for j in order:
            lam = float(vals[j])
            if lam <= 1e-14 * top:
                break
            v = vecs[:, j]
            weights.append(w * lam)
            states.append(np.outer(v, v.conj()))
    return Ensemble(np.array(weights), tuple(states))


def discretize(mu: Ensemble, n: int) -> Ensemble:
    """Reduce a many-atom measure to a small ensemble, preserving the barycenter.

    Greedy metric covering: atoms (sorted by weight descending) are assigned
    first-fit to cells of trace-norm radius < 1/(2n) around their seed atom,
    so each cell has diameter < 1/n.  The highest-mass cells are kept until
    the residual mass is below 1/n; remaining cells merge into one.  Each
    output atom carries the cell mass and the normalized cell barycenter, so
    the overall barycenter is preserved exactly.
    """
    if n < 1:
        raise InvalidResolution(f"resolution must be >= 1, got {n}")
    order = np.argsort(mu.weights)[::-1]
    radius = 0.5 / n
    sqrt_dim = math.sqrt(mu.dim)

    def within(a: np.ndarray, b: np.ndarray) -> bool:
        # Frobenius screen: ||X||_F <= ||X||_1 <= sqrt(dim) ||X||_F, so the
        # exact trace norm is needed only in the ambiguous band.
        frob = float(np.linalg.norm(a - b))
        if frob >= radius:
            return False
        if sqrt_dim * frob < radius:
            return True
        return linalg.trace_norm(a - b) < radius

    seeds: list[np.ndarray] = []
    cell_mass: list[float] = []
    cell_sum: list[np.ndarray] = []
    for idx in order:
        s = mu.states[idx]
        w = float(mu.weights[idx])
        for c, seed in enumerate(seeds):
            if within(s, seed):
                cell_mass[c] += w
                cell_sum[c] += w * s
                break
        else:
            seeds.append(s)
            cell_mass.append(w)
            cell_sum.append(w * s.astype(complex).copy())

    by_mass = sorted(range(len(seeds)), key=lambda c: -cell_mass[c])
    kept: list[int] = []
    residual = 1.0
    for c in by_mass:
        if residual < 1.0 / n:
            break
        kept.append(c)
        residual -= cell_mass[c]
    tail = [c for c in by_mass if c not in set(kept)]

    weights, states = [], []
    for c in kept:
        weights.append(cell_mass[c])
        states.append(cell_sum[c] / cell_mass[c])
    if tail:
        mass = sum(cell_mass[c] for c in tail)
        acc = sum((cell_sum[c] for c in tail), np.zeros_like(cell_sum[tail[0]]))
        weights.append(mass)
        states.append(acc / mass)

    # Prune negligible atoms and renormalize their mass away.
    pairs = [(w, s) for w, s in zip(weights, states) if w >= WEIGHT_PRUNE]
    total = sum(w for w, _ in pairs)
    return Ensemble(
        np.array([w / total for w, _ in pairs]), tuple(s for _, s in pairs)
    )
