"""Figure rendering for experiment reports.

The report writer drops PNG files next to the delimited output: an MSE
curve over lambda (one series per sigma cell, error bars from the repeat
spread) and, for secure methods, the leakage bound per sigma cell.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_STYLE = {
    "figure.figsize": (6.0, 3.8),
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def _sigma_label(sr: float, sb: float) -> str:
    return f"$\\sigma_r^2$={sr:g}, $\\sigma_\\beta^2$={sb:g}"


def save_report_figures(report, directory, stem: str) -> list[Path]:
    """Render the report's figures into ``directory``; returns written paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    sigma_pairs = list(dict.fromkeys((c.sigma_r_sq, c.sigma_beta_sq) for c in report.cells))

    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for sr, sb in sigma_pairs:
            pts = [c for c in report.cells if (c.sigma_r_sq, c.sigma_beta_sq) == (sr, sb) and c.mses]
            if not pts:
                continue
            lams = [c.lam for c in pts]
            means = [c.mean_mse for c in pts]
            stds = [c.std_mse for c in pts]
            ax.errorbar(lams, means, yerr=stds, marker="o", capsize=3, label=_sigma_label(sr, sb))
        ax.set_xscale("log")
        ax.set_xlabel("$\\lambda$")
        ax.set_ylabel("mean MSE")
        ax.set_title(f"{report.spec.method}: MSE over {report.spec.repeats} repeats")
        if sigma_pairs:
            ax.legend()
        mse_path = directory / f"{stem}_mse.png"
        fig.savefig(mse_path)
        plt.close(fig)
        written.append(mse_path)

        leak_cells = {}
        for c in report.cells:
            if c.leakage_nats is not None:
                leak_cells.setdefault((c.sigma_r_sq, c.sigma_beta_sq), c.leakage_nats)
        if leak_cells:
            fig, ax = plt.subplots()
            labels = [_sigma_label(sr, sb) for sr, sb in leak_cells]
            values = list(leak_cells.values())
            ax.bar(range(len(values)), values, width=0.6)
            ax.set_xticks(range(len(values)), labels, rotation=15, ha="right")
            ax.set_ylabel("leakage bound [nats]")
            ax.set_title(f"{report.spec.method}: per-entry leakage upper bound")
            leak_path = directory / f"{stem}_leakage.png"
            fig.savefig(leak_path)
            plt.close(fig)
            written.append(leak_path)

    return written
