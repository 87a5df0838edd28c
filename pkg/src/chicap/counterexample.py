"""A constrained noiseless channel whose capacity is never attained.

The construction: states rho_n put mass 1 - q_n on the first letter and
spread q_n uniformly over the next n letters, with q_n = g(n) chosen so that
H(rho_n) = h2(q_n) + q_n log2 n increases monotonically to 1 while
q_n -> 0.  The closure of {rho_n} is compact, its only limit state is the
pure state rho* with H(rho*) = 0, so the supremum 1 of the chi values over
the set is not attained by any ensemble.

g is implicitly defined by g (1 - ln(g/x)) = ln 2 and satisfies the ODE
ln(g/x) g' = g/x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import DensityMatrix
from .errors import NoRoot

__all__ = [
    "solve_g",
    "g_ode_residual",
    "h2",
    "h_value",
    "state_rho_n",
    "CounterexamplePoint",
    "h_sequence",
    "GapReport",
    "gap_report",
]

LN2 = math.log(2.0)


def _g_equation(g: float, x: float) -> float:
    return g * (1.0 - math.log(g / x)) - LN2


def solve_g(x: float, tol: float = 1e-14) -> float:
    """Solve g (1 - ln(g/x)) = ln 2 for g in (0, 1], x >= 1.

    The left side is strictly increasing in g on (0, x), so bisection on
    [1e-18, 1] is safe; a Newton polish then drives the residual to tol.
    """
    if x < 1.0:
        raise ValueError(f"x must be >= 1, got {x!r}")
    lo, hi = 1e-18, 1.0
    if _g_equation(hi, x) < 0.0:
        raise NoRoot(f"no bracket for x={x!r}")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _g_equation(mid, x) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-8:
            break
    g = 0.5 * (lo + hi)
    for _ in range(50):
        resid = _g_equation(g, x)
        if abs(resid) <= tol:
            break
        deriv = -math.log(g / x)  # > 0 for g < x
        step = resid / deriv
        g = min(max(g - step, 1e-18), 1.0)
    if abs(_g_equation(g, x)) > max(tol, 1e-12):
        raise NoRoot(f"residual {abs(_g_equation(g, x)):.3e} at x={x!r}")
    return g


def g_ode_residual(x: float, delta: float = 1e-4) -> float:
    """|ln(g/x) g' - g/x| with g' from a central finite difference at step delta."""
    if x < 1.0 + delta:
        raise ValueError(f"x must be >= 1 + delta, got {x!r}")
    g = solve_g(x)
    g_prime = (solve_g(x + delta) - solve_g(x - delta)) / (2.0 * delta)
    return abs(math.log(g / x) * g_prime - g / x)


def h2(q: float) -> float:
    """Binary entropy in bits."""
    if q <= 0.0 or q >= 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def h_value(x: float) -> float:
    """h2(g(x)) + g(x) log2 x, the chi value of the state at parameter x."""
    g = solve_g(x)
    return h2(g) + g * math.log2(x)


def state_rho_n(n: int) -> DensityMatrix:
    """Diagonal state of dimension n+1: (1 - q_n, q_n/n, ..., q_n/n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    q = solve_g(float(n))
    diag = np.full(n + 1, q / n)
    diag[0] = 1.0 - q
    return DensityMatrix.validated(np.diag(diag).astype(complex))


@dataclass(frozen=True)
class CounterexamplePoint:
    n: int
    q_n: float
    h_value: float
    residual: float  # defining-equation residual of g(n)

    @property
    def state_dim(self) -> int:
        return self.n + 1


def h_sequence(n_max: int, grid=None) -> list[CounterexamplePoint]:
    """Evaluate the sequence on a grid of n values (default logarithmic).

    h_value increases strictly along the grid and stays below 1.
    """
    if grid is None:
        grid = _log_grid(n_max)
    points = []
    for n in grid:
        if n > n_max:
            raise ValueError(f"grid point {n} exceeds n_max {n_max}")
        q = solve_g(float(n))
        points.append(
            CounterexamplePoint(
                n=int(n),
                q_n=q,
                h_value=h2(q) + q * math.log2(n),
                residual=abs(_g_equation(q, float(n))),
            )
        )
    return points


def _log_grid(n_max: int) -> list[int]:
    grid, n = [], 1
    while n <= n_max:
        grid.append(n)
        n *= 10
    return grid


@dataclass(frozen=True)
class GapReport:
    sup_estimate: float  # h_value at n_max, a lower bound on the supremum
    chi_limit_state: float  # chi of the limit state rho*, exactly 0
    gap: float
    conclusion: str
    points: list


def gap_report(n_max: int, grid=None) -> GapReport:
    """Sup estimate vs the chi value at the unique limit state.

    A strictly positive gap shows that no generalized ensemble over the
    closure of the state sequence attains the constrained capacity.
    """
    if n_max < 10:
        raise ValueError(f"n_max must be >= 10, got {n_max}")
    points = h_sequence(n_max, grid)
    sup_estimate = points[-1].h_value
    chi_star = 0.0  # the limit state is pure
    return GapReport(
        sup_estimate=sup_estimate,
        chi_limit_state=chi_star,
        gap=sup_estimate - chi_star,
        conclusion=(
            "no optimal generalized ensemble exists: the capacity of the "
            "constrained noiseless channel is approached but not attained"
        ),
        points=points,
    )
