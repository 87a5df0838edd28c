"""Energy-type constraints: mean energy, energy balls, Gibbs states.

Constraints are diagonalized: an HConstraint stores the nondecreasing
eigenvalue list of the energy operator in the standard basis plus the bound
h defining the energy ball {rho : Tr rho H <= h}.  Callers working in a
rotated eigenbasis conjugate their states instead of rotating H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .channel import Channel, apply
from .density import _as_array, entropy, relative_entropy
from .ensemble import Ensemble, barycenter
from .errors import DegenerateTemperature, DimensionMismatch, ScheduleInfeasible

__all__ = [
    "HConstraint",
    "mean_energy",
    "in_energy_ball",
    "ensemble_energy_residual",
    "gibbs_state",
    "gibbs_identity_residual",
    "h_operator_from_states",
]


@dataclass(frozen=True)
class HConstraint:
    """Diagonal energy operator (nondecreasing eigenvalues) with bound h."""

    energies: np.ndarray
    bound: float

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        object.__setattr__(self, "energies", e)
        if e.min() < 0.0:
            raise ValueError(f"negative energy level {e.min()!r}")
        if np.any(np.diff(e) < 0.0):
            raise ValueError("energies must be nondecreasing")
        if not self.bound > 0.0:
            raise ValueError(f"bound must be positive, got {self.bound!r}")

    @property
    def dim(self) -> int:
        return len(self.energies)


def oscillator_constraint(dim: int, bound: float) -> HConstraint:
    """Number-operator energies (0, 1, ..., dim-1) at cutoff dim."""
    return HConstraint(np.arange(dim, dtype=float), bound)


def mean_energy(rho, h: HConstraint) -> float:
    """Tr rho H = sum_k energies[k] * rho_kk."""
    mat = _as_array(rho)
    if mat.shape[0] != h.dim:
        raise DimensionMismatch(f"state dim {mat.shape[0]} vs constraint dim {h.dim}")
    return float(np.real(np.diag(mat)) @ h.energies)


def in_energy_ball(rho, h: HConstraint, slack: float = 1e-12) -> bool:
    """Whether Tr rho H <= h (closed set; boundary counts as inside)."""
    return mean_energy(rho, h) <= h.bound + slack


def ensemble_energy_residual(pi: Ensemble, h: HConstraint) -> float:
    """|sum_i w_i Tr(rho_i H) - Tr(rho_bar H)|; zero up to round-off by linearity."""
    per_atom = sum(w * mean_energy(s, h) for w, s in zip(pi.weights, pi.states))
    return abs(float(per_atom) - mean_energy(barycenter(pi), h))


def gibbs_state(h: HConstraint, beta: float) -> np.ndarray:
    """Maximum-entropy state exp(-beta H)/Z at inverse temperature beta."""
    if beta <= 0.0:
        raise DegenerateTemperature(f"beta must be positive, got {beta!r}")
    # Shift by the ground energy before exponentiating to avoid underflow of Z.
    w = np.exp(-beta * (h.energies - h.energies.min()))
    return np.diag(w / w.sum()).astype(complex)


def log_partition(h: HConstraint, beta: float) -> float:
    """ln Tr exp(-beta H), computed stably via a ground-energy shift."""
    e0 = h.energies.min()
    return float(np.log(np.sum(np.exp(-beta * (h.energies - e0)))) - beta * e0)


def gibbs_identity_residual(
    phi: Channel, rho, h_prime: HConstraint, beta: float, log_base: float = 2.0
) -> float:
    """Residual of the relative-entropy-to-Gibbs-state identity

    H(Phi(rho) || rho_beta) = -H(Phi(rho)) + beta Tr Phi(rho) H' + ln Z,

    with the right-hand side converted to the configured log base.
    """
    out = apply(phi, rho)
    lhs = relative_entropy(out, gibbs_state(h_prime, beta), log_base=log_base)
    ln_base = math.log(log_base)
    rhs = (
        -entropy(out, log_base=log_base)
        + (beta * mean_energy(out, h_prime) + log_partition(h_prime, beta)) / ln_base
    )
    return abs(float(lhs) - float(rhs))


def h_operator_from_states(
    states, schedule=None
) -> tuple[HConstraint, np.ndarray]:
    """Build an energy constraint whose ball contains a given family of states.

    Projectors are chosen as dominant eigenvectors of the family mean; for
    each level n the smallest rank whose subspace carries mass >= 1 - n^-3
    for every family member is used (or the given explicit rank schedule).
    Basis vectors entering at level n+1 get energy n, which certifies
    Tr rho H <= sum n^-2 = pi^2/6 for every state in the family.

    Returns (constraint with energies in the rotated basis, basis columns U);
    a state rho is evaluated as mean_energy(U^dag rho U, constraint).
    """
    mats = [_as_array(s) for s in states]
    if not mats:
        raise ValueError("empty state family")
    dim = mats[0].shape[0]
    mean = sum(mats) / len(mats)
    vals, vecs = linalg.eigh(mean)
    order = np.argsort(vals)[::-1]
    u = vecs[:, order]

    # Mass of each family member in the leading-r eigenspaces.
    diag = np.array([np.real(np.diag(u.conj().T @ m @ u)) for m in mats])
    cum = np.cumsum(diag, axis=1)  # family x rank
    min_mass = cum.min(axis=0)  # min over family, index r-1

    def smallest_rank(target: float) -> int | None:
        hit = np.nonzero(min_mass >= target)[0]
        return int(hit[0]) + 1 if hit.size else None

    ranks: list[int] = []
    n = 1
    while True:
        target = 1.0 - n**-3
        if schedule is not None and n <= len(schedule):
            r = int(schedule[n - 1])
            if not (1 <= r <= dim) or min_mass[r - 1] < target:
                raise ScheduleInfeasible(
                    f"rank {r} does not reach mass {target!r} at level {n}"
                )
        else:
            r = smallest_rank(target)
            if r is None:
                raise ScheduleInfeasible(
                    f"no rank reaches mass {target!r} at level {n}"
                )
        r = max(r, ranks[-1]) if ranks else r  # cumulative span is nested
        ranks.append(r)
        if r == dim:
            break
        n += 1

    energies = np.empty(dim)
    energies[: ranks[0]] = 0.0
    for level in range(1, len(ranks)):
        energies[ranks[level - 1] : ranks[level]] = float(level)
    bound = math.pi**2 / 6.0
    constraint = HConstraint(energies, bound)

    for m in mats:
        e = mean_energy(u.conj().T @ m @ u, constraint)
        assert e <= bound + 1e-9, f"family member has energy {e!r} > {bound!r}"
    return constraint, u
