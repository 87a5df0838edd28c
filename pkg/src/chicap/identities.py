"""Randomized residual suites for the core entropy identities.

Each suite draws seeded random instances and reports the maximal residual
observed, which the contract bounds by a fixed tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import apply
from .density import entropy, relative_entropy
from .energy import (
    HConstraint,
    ensemble_energy_residual,
    gibbs_identity_residual,
)
from .ensemble import Ensemble, barycenter, chi, donald_residual
from .rand import random_channel, random_ensemble, random_state

__all__ = ["IdentitySuiteResult", "run_identity_suites"]


@dataclass(frozen=True)
class IdentitySuiteResult:
    name: str
    max_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def _dims(rng, trials):
    return rng.integers(2, 9, size=trials)


def donald_suite(seed: int, trials: int) -> IdentitySuiteResult:
    """Ensemble relative-entropy decomposition, with and without a channel."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for dim in _dims(rng, trials):
        pi = random_ensemble(int(dim), int(rng.integers(2, 6)), rng)
        sigma = random_state(int(dim), rng)
        worst = max(worst, donald_residual(pi, sigma))
        phi = random_channel(int(dim), int(dim), rng)
        worst = max(worst, donald_residual(pi, sigma, phi))
    return IdentitySuiteResult("donald", worst, 1e-9)


def gibbs_suite(seed: int, trials: int) -> IdentitySuiteResult:
    """Relative entropy to a Gibbs state vs its free-energy expansion."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for dim in _dims(rng, trials):
        dim = int(dim)
        phi = random_channel(dim, dim, rng)
        rho = random_state(dim, rng)
        h = HConstraint(np.sort(rng.uniform(0.0, 3.0, size=dim)), 1.0)
        beta = float(rng.uniform(0.1, 10.0))
        worst = max(worst, gibbs_identity_residual(phi, rho, h, beta))
    return IdentitySuiteResult("gibbs", worst, 1e-9)


def chi_two_form_suite(seed: int, trials: int) -> IdentitySuiteResult:
    """Relative-entropy form of chi against the entropy-difference form."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for dim in _dims(rng, trials):
        dim = int(dim)
        phi = random_channel(dim, dim, rng)
        pi = random_ensemble(dim, int(rng.integers(2, 6)), rng)
        avg_out = apply(phi, barycenter(pi))
        rel_form = chi(phi, pi)
        ent_form = entropy(avg_out) - sum(
            w * entropy(apply(phi, s)) for w, s in zip(pi.weights, pi.states)
        )
        worst = max(worst, abs(rel_form - float(ent_form)))
    return IdentitySuiteResult("chi_two_form", worst, 1e-9)


def energy_linearity_suite(seed: int, trials: int) -> IdentitySuiteResult:
    """Mean energy of the barycenter vs the ensemble-averaged mean energy."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for dim in _dims(rng, trials):
        dim = int(dim)
        pi = random_ensemble(dim, int(rng.integers(2, 6)), rng)
        h = HConstraint(np.sort(rng.uniform(0.0, 3.0, size=dim)), 1.0)
        worst = max(worst, ensemble_energy_residual(pi, h))
    return IdentitySuiteResult("energy_linearity", worst, 1e-12)


def run_identity_suites(seed: int = 0, trials: int = 100) -> list[IdentitySuiteResult]:
    return [
        donald_suite(seed, trials),
        gibbs_suite(seed + 1, trials),
        chi_two_form_suite(seed + 2, trials),
        energy_linearity_suite(seed + 3, trials),
    ]
