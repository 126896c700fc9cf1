"""Volume-curve figures."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def volume_curve_figure(xs: Sequence[float], vols: Sequence[float], path: str, minimizer: float | None = None,
                        title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, vols, lw=1.5)
    if minimizer is not None:
        ax.axvline(minimizer, ls="--", color="gray", lw=1, label=f"minimizer {minimizer:.6g}")
        ax.legend()
    ax.set_xlabel("slice parameter x")
    ax.set_ylabel("vol")
    ax.set_yscale("log")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
