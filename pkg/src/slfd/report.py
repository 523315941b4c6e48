"""Result emission: aligned summary table, convergence CSV, and figures.

The CSV carries one row per (index, rank) with the header
``n,rank,lambda_corr,lambda_sum,corr_norm,eta,eta_bar``; the figures plot the
natural logs of the correction norms and residuals against the rank, one
curve per eigenvalue index.
"""

from __future__ import annotations

import csv
import os

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .fdengine import FdSolution  # noqa: E402

CSV_HEADER = ["n", "rank", "lambda_corr", "lambda_sum", "corr_norm", "eta", "eta_bar"]


def write_convergence_csv(solutions: list[FdSolution], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for sol in solutions:
            partial = sol.lambda_partial
            for j in range(sol.rank + 1):
                writer.writerow(
                    [
                        sol.index,
                        j,
                        repr(float(sol.lambda_corrections[j])),
                        repr(float(partial[j])),
                        repr(float(sol.norms_normalized[j])),
                        repr(float(sol.eta[j])),
                        repr(float(sol.eta_bar[j])),
                    ]
                )


def summary_table(solutions: list[FdSolution], reference: dict[int, float] | None = None) -> str:
    header = ["n", "m", "lambda_sum", "|lambda_m|", "||u_m||", "eta", "eta_bar"]
    if reference:
        header.append("|lambda - ref|")
    rows = [header]
    for sol in solutions:
        row = [
            str(sol.index),
            str(sol.rank),
            f"{sol.eigenvalue_sum:.15g}",
            f"{abs(sol.lambda_corrections[-1]):.3e}",
            f"{sol.norms_normalized[-1]:.3e}",
            f"{sol.eta[-1]:.3e}",
            f"{sol.eta_bar[-1]:.3e}",
        ]
        if reference:
            ref = reference.get(sol.index)
            row.append("-" if ref is None else f"{abs(sol.eigenvalue_sum - ref):.3e}")
        rows.append(row)
    widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
    lines = []
    for r, row in enumerate(rows):
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        if r == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _log_curve(ax, xs, values, label):
    values = np.asarray(values, dtype=float)
    mask = values > 0.0
    ax.plot(np.asarray(xs)[mask], np.log(values[mask]), marker="o", ms=3, label=label)


def render_figures(solutions: list[FdSolution], out_dir: str) -> list[str]:
    """Convergence figures rendered next to the delimited output."""
    paths = []
    for key, attr, ylabel in (
        ("convergence_norms", "norms_normalized", r"$\ln\,\|u^{(m)}\|$"),
        ("convergence_eta", "eta", r"$\ln\,\eta_m$"),
        ("convergence_eta_bar", "eta_bar", r"$\ln\,\bar\eta_m$"),
    ):
        fig, ax = plt.subplots(figsize=(5.4, 3.6))
        for sol in solutions:
            _log_curve(ax, range(sol.rank + 1), getattr(sol, attr), f"n = {sol.index}")
        ax.set_xlabel("rank m")
        ax.set_ylabel(ylabel)
        ax.legend(fontsize=8)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = os.path.join(out_dir, f"{key}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
