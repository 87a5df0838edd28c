"""Constrained chi-capacity estimation and optimality certification.

The solver is a conditional-gradient support exchange: probe for the pure
state maximizing the relative entropy to the current output average
(Lagrangian-penalized by the energy when constrained), add it to the
support, reoptimize the weights by a multiplicative (Blahut-Arimoto-style)
update, prune, repeat.  The probe value doubles as the optimality
certificate: the ensemble is optimal exactly when no feasible probe measure
beats its own chi (maximal distance property), so the stopping rule and the
certificate coincide.

The probe maximization over pure states is nonconvex; multi-start ascent
makes the reported gap a best-effort lower bound on the true gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channel import Channel, apply
from .density import DensityMatrix, entropy, relative_entropy, _as_array
from .ensemble import Ensemble, barycenter, chi
from .energy import HConstraint, mean_energy
from .errors import Infeasible, MaxItersExceeded, NonState
from .linalg import TOL_RANK

__all__ = [
    "SolverOptions",
    "TracePoint",
    "CapacityReport",
    "CertificateResult",
    "optimize_weights",
    "solve_capacity",
    "certify_optimality",
    "chi_of_state",
]

# Stand-in for log2 of a numerically zero eigenvalue; keeps probe gradients
# finite while still pushing hard toward unsupported directions.
FLOOR_LOG2 = -400.0

WEIGHT_PRUNE = 1e-12


@dataclass(frozen=True)
class SolverOptions:
    max_outer_iters: int = 200
    tol_gap: float = 1e-6
    tol_weights: float = 1e-9
    n_probe_starts: int = 20
    seed: int = 0
    lagrange_bisection_iters: int = 60


@dataclass(frozen=True)
class TracePoint:
    iteration: int
    chi: float
    gap: float
    mean_energy: float
    support_size: int


@dataclass(frozen=True)
class CapacityReport:
    chi_value: float
    ensemble: Ensemble
    certificate_gap: float
    constraint_active: bool
    lagrange_multiplier: float
    trace: list


@dataclass(frozen=True)
class CertificateResult:
    """Certificate gap plus the probe measure that attains it."""

    gap: float
    witness: Ensemble | None

    def __float__(self) -> float:
        return self.gap


# ---------------------------------------------------------------------------
# spectral helpers


def _log2_floored(mat: np.ndarray) -> np.ndarray:
    """Matrix log2 with the numerical kernel mapped to FLOOR_LOG2."""
    vals, vecs = linalg.eigh(mat)
    top = float(vals.max(initial=0.0))
    logs = np.full(len(vals), FLOOR_LOG2)
    if top > 0.0:
        keep = vals > TOL_RANK * top
        logs[keep] = np.log2(vals[keep])
    return vecs @ np.diag(logs) @ vecs.conj().T


def _dual_apply(phi: Channel, m: np.ndarray) -> np.ndarray:
    """Adjoint map sum_k K^dag M K."""
    acc = np.zeros((phi.dim_in, phi.dim_in), dtype=complex)
    for k in phi.kraus:
        acc += k.conj().T @ m @ k
    return linalg.symmetrize(acc)


def _neg_output_entropy(out: np.ndarray) -> float:
    """Tr X log2 X for a (near-)unit-trace output."""
    return -entropy(out)


# ---------------------------------------------------------------------------
# pure-state probe


def _probe_objective(phi, psi, log_sigma, penalty):
    """Surrogate for D(Phi psi || sigma) minus the linear penalty.

    Uses the floored log of sigma, so support leaks show up as a large
    finite value rather than inf (which the ascent can still chase).
    """
    out = apply(phi, np.outer(psi, psi.conj()))
    value = _neg_output_entropy(out) - float(np.real(np.trace(out @ log_sigma)))
    if penalty is not None:
        value -= float(np.real(psi.conj() @ (penalty @ psi)))
    return value, out


def _probe_ascent(phi, psi, log_sigma, penalty, iters=80):
    """Linearize-and-reoptimize ascent from one start; monotone because the
    objective is convex in the input state."""
    value, out = _probe_objective(phi, psi, log_sigma, penalty)
    for _ in range(iters):
        grad = _dual_apply(phi, _log2_floored(out) - log_sigma)
        if penalty is not None:
            grad = grad - penalty
        _, vecs = linalg.eigh(grad)
        cand = vecs[:, -1]
        cand_value, cand_out = _probe_objective(phi, cand, log_sigma, penalty)
        if cand_value <= value + 1e-13:
            break
        psi, value, out = cand, cand_value, cand_out
    return value, psi


def _probe_starts(phi, log_sigma, penalty, n_random, rng):
    dim = phi.dim_in
    starts = [np.eye(dim, dtype=complex)[:, i] for i in range(dim)]
    linear = _dual_apply(phi, -log_sigma)
    if penalty is not None:
        linear = linear - penalty
    _, vecs = linalg.eigh(linear)
    starts.extend(vecs[:, -k] for k in range(1, min(dim, 3) + 1))
    for _ in range(n_random):
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        starts.append(v / np.linalg.norm(v))
    return starts


def _probe(phi, sigma, lam, constraint, opts, rng):
    """Best pure state for D(Phi psi||sigma) - lam * energy(psi).

    Returns (best surrogate value, best psi, candidates) where candidates is
    a list of (true relative entropy, mean energy, psi) local maxima.
    """
    log_sigma = _log2_floored(sigma)
    penalty = None
    if constraint is not None and lam != 0.0:
        penalty = lam * np.diag(constraint.energies).astype(complex)
    candidates = []
    best_value, best_psi = -math.inf, None
    for start in _probe_starts(phi, log_sigma, penalty, opts.n_probe_starts, rng):
        value, psi = _probe_ascent(phi, start, log_sigma, penalty)
        state = np.outer(psi, psi.conj())
        true_d = relative_entropy(apply(phi, state), sigma)
        energy = (
            mean_energy(state, constraint) if constraint is not None else 0.0
        )
        candidates.append((true_d, energy, psi))
        if value > best_value:
            best_value, best_psi = value, psi
    return best_value, best_psi, candidates


# ---------------------------------------------------------------------------
# weight optimization on a fixed support


def _ba_weights(outputs, slogs, energies, lam, w0, tol, max_iters=5000):
    """Multiplicative update for the penalized chi over a fixed support.

    Returns (weights, lower bound, upper bound) for the penalized objective
    sum_i w_i (D_i - lam e_i); upper - lower bounds the suboptimality.
    """
    w = np.array(w0, dtype=float)
    lb = ub = 0.0
    for _ in range(max_iters):
        sigma = sum(wi * oi for wi, oi in zip(w, outputs))
        log_sigma = _log2_floored(sigma)
        d = np.array(
            [
                s - float(np.real(np.trace(o @ log_sigma)))
                for s, o in zip(slogs, outputs)
            ]
        )
        score = d - lam * energies
        ub = float(score.max())
        lb = float(w @ score)
        if ub - lb <= tol:
            break
        w = w * np.exp2(score - ub)  # shift for overflow safety
        w = np.clip(w, 1e-300, None)
        w /= w.sum()
    return w, lb, ub


def _optimize_weights(phi, states, constraint, opts):
    """Maximize chi over weights on a fixed support, subject to the energy ball.

    Returns (weights, lagrange multiplier, kkt residual).  The constrained
    case bisects the multiplier until the mean energy lands on the bound,
    then mixes the flanking weight vectors so the bound holds exactly.
    """
    outputs = [apply(phi, s) for s in states]
    slogs = [_neg_output_entropy(o) for o in outputs]
    energies = np.array(
        [mean_energy(s, constraint) if constraint is not None else 0.0 for s in states]
    )
    n = len(states)
    w0 = np.full(n, 1.0 / n)

    w, lb, ub = _ba_weights(outputs, slogs, energies, 0.0, w0, opts.tol_weights)
    if constraint is None or float(w @ energies) <= constraint.bound + 1e-12:
        return w, 0.0, ub - lb

    h = constraint.bound
    if energies.min() > h:
        raise Infeasible(
            f"support minimum energy {energies.min()!r} exceeds bound {h!r}"
        )

    lam_lo, w_lo = 0.0, w  # energy above the bound
    lam_hi = 1.0
    for _ in range(60):
        w_hi, lb, ub = _ba_weights(outputs, slogs, energies, lam_hi, w0, opts.tol_weights)
        if float(w_hi @ energies) <= h:
            break
        lam_lo, w_lo = lam_hi, w_hi
        lam_hi *= 2.0
    for _ in range(opts.lagrange_bisection_iters):
        lam = 0.5 * (lam_lo + lam_hi)
        w_mid, lb, ub = _ba_weights(outputs, slogs, energies, lam, w0, opts.tol_weights)
        if float(w_mid @ energies) <= h:
            lam_hi, w_hi = lam, w_mid
        else:
            lam_lo, w_lo = lam, w_mid

    # Mix the flanking vectors to put the mean energy exactly on the bound
    # (chi is concave, so the mixture does not fall below the worse side).
    e_lo, e_hi = float(w_lo @ energies), float(w_hi @ energies)
    if e_lo > h >= e_hi and e_lo > e_hi:
        t = (h - e_hi) / (e_lo - e_hi)
        t = max(0.0, t - 1e-13)
        w = t * w_lo + (1.0 - t) * w_hi
    else:
        w = w_hi
    lam = lam_hi
    _, lb, ub = _ba_weights(outputs, slogs, energies, lam, w, opts.tol_weights, max_iters=1)
    return w, lam, ub - lb


def optimize_weights(
    phi: Channel,
    states,
    constraint: HConstraint | None = None,
    opts: SolverOptions = SolverOptions(),
) -> Ensemble:
    """Best weights for a fixed candidate support; zero-weight atoms pruned."""
    states = [_as_array(s) for s in states]
    w, _, _ = _optimize_weights(phi, states, constraint, opts)
    return _pruned_ensemble(w, states)


def _pruned_ensemble(w, states, prune=WEIGHT_PRUNE):
    keep = [i for i in range(len(states)) if w[i] >= prune]
    if not keep:
        keep = [int(np.argmax(w))]
    ww = np.array([w[i] for i in keep])
    return Ensemble(ww / ww.sum(), tuple(states[i] for i in keep))


# ---------------------------------------------------------------------------
# outer solver


def solve_capacity(
    phi: Channel,
    constraint: HConstraint | None = None,
    opts: SolverOptions = SolverOptions(),
) -> CapacityReport:
    """Constrained chi-capacity by conditional-gradient support exchange."""
    dim = phi.dim_in
    if constraint is not None and constraint.energies.min() > constraint.bound:
        raise Infeasible(
            "energy ball is empty: ground energy "
            f"{constraint.energies.min()!r} exceeds bound {constraint.bound!r}"
        )
    rng = np.random.default_rng(opts.seed)
    eye = np.eye(dim, dtype=complex)
    support = [np.outer(eye[:, i], eye[:, i].conj()) for i in range(dim)]

    trace: list[TracePoint] = []
    best_report = None
    for it in range(opts.max_outer_iters):
        w, lam, _ = _optimize_weights(phi, support, constraint, opts)
        ens = _pruned_ensemble(w, support)
        support = list(ens.states)

        rho_bar = barycenter(ens)
        sigma = apply(phi, rho_bar)
        chi_value = chi(phi, ens)
        energy_bar = (
            mean_energy(rho_bar, constraint) if constraint is not None else 0.0
        )

        probe_value, probe_psi, _ = _probe(phi, sigma, lam, constraint, opts, rng)
        upper = probe_value + (lam * constraint.bound if constraint is not None else 0.0)
        gap = max(upper - chi_value, 0.0)
        trace.append(TracePoint(it, chi_value, gap, energy_bar, len(ens)))

        report = CapacityReport(
            chi_value=chi_value,
            ensemble=ens,
            certificate_gap=gap,
            constraint_active=(
                constraint is not None
                and (lam > 0.0 or energy_bar >= constraint.bound - 1e-9)
            ),
            lagrange_multiplier=lam,
            trace=list(trace),
        )
        if best_report is None or gap < best_report.certificate_gap:
            best_report = report
        if gap <= opts.tol_gap:
            return report

        new_state = np.outer(probe_psi, probe_psi.conj())
        if all(linalg.trace_norm(new_state - s) > 1e-12 for s in support):
            support.append(new_state)
        if len(support) > dim * dim:
            # Caratheodory-type safety cap: drop the lightest atom.
            lightest = int(np.argmin(ens.weights))
            support.pop(lightest)

    raise MaxItersExceeded(best_report)


# ---------------------------------------------------------------------------
# certification


def certify_optimality(
    phi: Channel,
    pi: Ensemble,
    constraint: HConstraint | None = None,
    opts: SolverOptions = SolverOptions(),
) -> CertificateResult:
    """Maximal-distance certificate for a candidate ensemble.

    Probes for the feasible measure with the largest average relative
    entropy to the ensemble's output average.  A gap at most tol certifies
    optimality; a larger gap comes with the violating measure as witness.
    When the best pure state violates the energy ball, the probe measure is
    the best feasible two-point mixture toward a low-energy state.
    """
    rng = np.random.default_rng(opts.seed)
    rho_bar = barycenter(pi)
    sigma = apply(phi, rho_bar)
    chi_value = chi(phi, pi)
    _, _, candidates = _probe(phi, sigma, 0.0, constraint, opts, rng)

    # Raw basis states widen the pool of feasible mixture partners.
    eye = np.eye(phi.dim_in, dtype=complex)
    for i in range(phi.dim_in):
        psi = eye[:, i]
        state = np.outer(psi, psi.conj())
        true_d = relative_entropy(apply(phi, state), sigma)
        energy = mean_energy(state, constraint) if constraint is not None else 0.0
        candidates.append((true_d, energy, psi))

    if constraint is None:
        d_best, _, psi_best = max(candidates, key=lambda c: c[0])
        witness = Ensemble([1.0], (np.outer(psi_best, psi_best.conj()),))
        return CertificateResult(gap=d_best - chi_value, witness=witness)

    h = constraint.bound
    best_value, best_witness = -math.inf, None
    for d, e, psi in candidates:
        if e <= h + 1e-12 and d > best_value:
            best_value = d
            best_witness = Ensemble([1.0], (np.outer(psi, psi.conj()),))
    for d_a, e_a, psi_a in candidates:
        if e_a <= h:
            continue
        for d_b, e_b, psi_b in candidates:
            if e_b > h or not math.isfinite(d_b):
                continue
            t = min(1.0, (h - e_b) / (e_a - e_b))
            if t <= 0.0:
                continue
            value = t * d_a + (1.0 - t) * d_b
            if value > best_value:
                best_value = value
                if t >= 1.0 - 1e-15:
                    best_witness = Ensemble(
                        [1.0], (np.outer(psi_a, psi_a.conj()),)
                    )
                else:
                    best_witness = Ensemble(
                        [t, 1.0 - t],
                        (
                            np.outer(psi_a, psi_a.conj()),
                            np.outer(psi_b, psi_b.conj()),
                        ),
                    )
    return CertificateResult(gap=best_value - chi_value, witness=best_witness)


# ---------------------------------------------------------------------------
# fixed-average chi by LP column generation


def _moment_rows(dim):
    """Real linear functionals spanning Hermitian matrices of size dim."""
    rows = []
    for i in range(dim):
        rows.append(("diag", i, i))
    for i in range(dim):
        for j in range(i + 1, dim):
            rows.append(("re", i, j))
            rows.append(("im", i, j))
    return rows


def _moments(state, rows):
    out = np.empty(len(rows))
    for k, (kind, i, j) in enumerate(rows):
        if kind == "diag":
            out[k] = float(np.real(state[i, i]))
        elif kind == "re":
            out[k] = float(np.real(state[i, j]))
        else:
            out[k] = float(np.imag(state[i, j]))
    return out


def _dual_matrix(duals, rows, dim):
    lam = np.zeros((dim, dim), dtype=complex)
    for k, (kind, i, j) in enumerate(rows):
        if kind == "diag":
            lam[i, i] += duals[k]
        elif kind == "re":
            lam[i, j] += duals[k] / 2.0
            lam[j, i] += duals[k] / 2.0
        else:
            lam[i, j] += 1j * duals[k] / 2.0
            lam[j, i] += -1j * duals[k] / 2.0
    return lam


def chi_of_state(
    phi: Channel, rho0, opts: SolverOptions = SolverOptions()
) -> CapacityReport:
    """Chi of a fixed average state: best pure-state decomposition of rho0.

    With the barycenter pinned to rho0, the objective is linear in the
    decomposition measure, so the problem is a semi-infinite LP over pure
    states in the support of rho0; it is solved by column generation with
    the usual relative-entropy probe pricing the columns.
    """
    from scipy.optimize import linprog

    rho0 = DensityMatrix.validated(_as_array(rho0)).entries
    vals, vecs = linalg.eigh(rho0)
    keep = vals > TOL_RANK * float(vals.max())
    v0 = vecs[:, keep]
    r = v0.shape[1]
    sub = Channel(
        r,
        phi.dim_out,
        tuple(k @ v0 for k in phi.kraus),
        kind=phi.kind,
        validated=True,
    )
    sigma = apply(phi, rho0)
    log_sigma = _log2_floored(sigma)
    rho0_sub = v0.conj().T @ rho0 @ v0

    rows = _moment_rows(r)
    b = _moments(rho0_sub, rows)
    rng = np.random.default_rng(opts.seed)

    def column(psi):
        state = np.outer(psi, psi.conj())
        d = relative_entropy(apply(sub, state), sigma)
        return d, _moments(state, rows)

    psis = [np.eye(r, dtype=complex)[:, i] for i in range(r)]
    for _ in range(max(0, opts.n_probe_starts // 4)):
        v = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        psis.append(v / np.linalg.norm(v))
    cols = [column(p) for p in psis]

    trace: list[TracePoint] = []
    gap = math.inf
    value = 0.0
    w = None
    for it in range(opts.max_outer_iters):
        c = np.array([d for d, _ in cols])
        a_eq = np.column_stack([m for _, m in cols])
        res = linprog(
            -c, A_eq=a_eq, b_eq=b, bounds=(0.0, None), method="highs"
        )
        if not res.success:
            raise NonState(f"decomposition LP failed: {res.message}")
        w = res.x
        value = float(c @ w)
        # Equality duals of the minimization; pricing needs the sign that
        # makes reduced costs D(psi) - <psi|Lam|psi> nonpositive at optimum.
        lam = _dual_matrix(-np.asarray(res.eqlin.marginals), rows, r)

        # Price the columns: best pure state for D(psi) - <psi|Lam|psi>.
        best_rc, best_psi = -math.inf, None
        for start in _probe_starts(sub, log_sigma, lam, opts.n_probe_starts, rng):
            rc, psi = _probe_ascent(sub, start, log_sigma, lam)
            if rc > best_rc:
                best_rc, best_psi = rc, psi
        gap = max(best_rc, 0.0)
        trace.append(TracePoint(it, value, gap, 0.0, int(np.sum(w > WEIGHT_PRUNE))))
        if gap <= opts.tol_gap:
            break
        psis.append(best_psi)
        cols.append(column(best_psi))

    keep_idx = [i for i in range(len(psis)) if w[i] > WEIGHT_PRUNE]
    states = tuple(
        v0 @ np.outer(psis[i], psis[i].conj()) @ v0.conj().T for i in keep_idx
    )
    ww = np.array([w[i] for i in keep_idx])
    ens = Ensemble(ww / ww.sum(), states)
    return CapacityReport(
        chi_value=chi(phi, ens),
        ensemble=ens,
        certificate_gap=max(gap, 0.0),
        constraint_active=False,
        lagrange_multiplier=0.0,
        trace=trace,
    )
