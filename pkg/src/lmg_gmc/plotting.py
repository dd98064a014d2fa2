"""Static figures for sweeps, correlation spectra and size-scaling fits.

Every function writes one file; the format follows the suffix (svg, png, pdf).
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _figure(width=6.0, height=None):
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    fig, ax = plt.subplots(figsize=(width, height or width * golden))
    return fig, ax


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical for svg
    metadata = {"Date": None} if path.suffix.lower() == ".svg" else None
    with plt.rc_context({"svg.hashsalt": "lmg-gmc"}):
        fig.savefig(path, metadata=metadata)
    plt.close(fig)
    return path


def plot_sweep(curves, path, derivative: bool = False, title: str | None = None) -> Path:
    fig, ax = _figure()
    for c in curves:
        y = c.derivative if derivative else c.values
        label = "total" if c.k == 1 else f"k = {c.k}"
        ax.plot(c.h_grid, y, label=label)
    ax.set_xlabel("h")
    ax.set_ylabel("dS/dh (bits)" if derivative else "S (bits)")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_spectrum(ks: Sequence[int], above: Sequence[float], path,
                  title: str | None = None) -> Path:
    fig, ax = _figure()
    ax.plot(ks, above, marker=".", linestyle="-")
    ax.set_xlabel("k")
    ax.set_ylabel(r"$S^{k\to N}$ (bits)")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_fss(fit, path, h_min: Sequence[float] | None = None) -> Path:
    """Log-log scaling plot with the fitted line; optional h_min(N) panel."""
    ncols = 2 if h_min is not None else 1
    fig, axes = plt.subplots(1, ncols, figsize=(5.0 * ncols, 3.8))
    axes = np.atleast_1d(axes)
    n = np.asarray(fit.sizes, dtype=float)
    ax = axes[0]
    ax.loglog(n, fit.correlation_at_min, "o", ms=3, label="data")
    ax.loglog(n, fit.prefactor_A * n**fit.alpha, "-",
              label=rf"$\alpha = {fit.alpha:.3f} \pm {fit.alpha_stderr:.3f}$")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$S^k(h_{min})$")
    ax.set_title(f"k = {fit.k_spec}")
    ax.legend(frameon=False)
    if h_min is not None:
        axes[1].plot(n, h_min, "o", ms=3)
        axes[1].axhline(1.0, color="grey", lw=0.8, ls="--")
        axes[1].set_xlabel("N")
        axes[1].set_ylabel(r"$h_{min}$")
    return _save(fig, path)
