"""Figure rendering for the report-producing commands.

Figures are written to files next to the delimited output; the Agg backend
keeps everything headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .oracles import EntropyTable
from .tables import DiagnosticsReport


def render_diagnostics_figure(report: DiagnosticsReport, path: str | Path) -> Path:
    """Approximant sequences vs order, with the relevant exact reference."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    a_r = list(range(len(report.a_values)))
    a_y = [float(av.value) for av in report.a_values]
    b_r = list(range(len(report.b_values)))
    b_y = [float(bv) for bv in report.b_values]
    ax.plot(a_r, a_y, "o-", label="first sequence (1/d partial sums)")
    ax.plot(b_r, b_y, "s--", label="second sequence (stored)")
    if report.a_errors is not None:
        lam2 = a_y[0] - float(report.a_errors[0])
        ax.axhline(lam2, color="k", lw=0.8, label="exact 2d constant")
    else:
        from .oracles import LAMBDA3_LOWER, LAMBDA3_UPPER

        ax.axhspan(
            float(LAMBDA3_LOWER),
            float(LAMBDA3_UPPER),
            color="0.85",
            label="proven 3d bounds",
        )
        est_r = [e.r for e in report.transferred]
        est_y = [float(e.value) for e in report.transferred]
        ax.plot(est_r, est_y, "^:", label="transferred estimates")
    ax.set_xlabel("order r")
    ax.set_ylabel("entropy approximant")
    ax.set_title(f"Approximation sequences, d={report.d}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_entropy_figure(table: EntropyTable, path: str | Path) -> Path:
    """Finite-torus per-site entropy vs size against the exact constant."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    sizes = [row.size for row in table.rows]
    entropies = [row.entropy for row in table.rows]
    ax.plot(sizes, entropies, "o-", label="torus per-site entropy")
    ax.axhline(table.reference, color="k", lw=0.8, label="exact 2d constant")
    ax.set_xlabel("torus side")
    ax.set_ylabel("ln(matchings) per site")
    ax.set_title("Finite-size entropy convergence")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
