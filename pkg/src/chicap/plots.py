"""Figure rendering for the report paths.

Figures are written next to the delimited output with the same stem; the
Agg backend keeps everything headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["counterexample_figure", "convergence_figure"]


def counterexample_figure(points, path: Path) -> Path:
    """Capacity approach curve: h value and its distance to 1 against n."""
    ns = [p.n for p in points]
    hs = [p.h_value for p in points]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.semilogx(ns, hs, "o-")
    ax1.axhline(1.0, color="gray", linestyle="--", linewidth=1)
    ax1.set_xlabel("n")
    ax1.set_ylabel("chi value of state n (bits)")
    ax1.set_title("approach to the unattained capacity")
    ax2.loglog(ns, [1.0 - h for h in hs], "o-")
    ax2.set_xlabel("n")
    ax2.set_ylabel("1 - chi value")
    ax2.set_title("remaining gap")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def convergence_figure(report, path: Path) -> Path:
    """Solver trace: chi estimate and certificate gap per outer iteration."""
    iters = [t.iteration for t in report.trace]
    chis = [t.chi for t in report.trace]
    gaps = [max(t.gap, 1e-16) for t in report.trace]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(iters, chis, "o-")
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("chi estimate (bits)")
    ax1.set_title("ascent trace")
    ax2.semilogy(iters, gaps, "o-")
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("certificate gap")
    ax2.set_title("optimality gap")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
