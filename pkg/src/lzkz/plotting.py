"""SVG renderings of sweep results: interference heatmap and defect-density curve."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import rcParams
from matplotlib.figure import Figure

from lzkz import kz
from lzkz.sweep import SweepResult

# stable element ids so identical data give identical files
rcParams["svg.hashsalt"] = "lzkz"
rcParams["svg.fonttype"] = "none"


def _save(fig: Figure, path, description: str) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": "lzkz", "Description": description})
    return path


def value_range(result: SweepResult, column: str) -> tuple[float, float]:
    v = result.column(column)
    v = v[np.isfinite(v)]
    return float(v.min()), float(v.max())


def render_map(result: SweepResult, path, column: str = "p_excited_numeric") -> Path:
    """Heatmap of ``column`` over (eps_lz0, nu); colour scale spans the data min/max."""
    eps = np.unique(result.column("eps_lz0"))
    nus = np.unique(result.column("nu"))
    grid = np.full((len(nus), len(eps)), np.nan)
    ie = np.searchsorted(eps, result.column("eps_lz0"))
    inu = np.searchsorted(nus, result.column("nu"))
    grid[inu, ie] = result.column(column)
    vmin, vmax = value_range(result, column)

    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot()
    if len(eps) > 1 and len(nus) > 1:
        mesh = ax.pcolormesh(eps, nus, grid, shading="nearest", vmin=vmin, vmax=vmax, cmap="viridis")
        if nus[-1] / nus[0] > 10:
            ax.set_yscale("log")
    else:
        mesh = ax.scatter(result.column("eps_lz0"), result.column("nu"), c=result.column(column), vmin=vmin, vmax=vmax)
    fig.colorbar(mesh, ax=ax, label=r"$P_{|1\rangle}$")
    ax.set_xlabel(r"$\varepsilon_{LZ0}$ ($\mu$eV)")
    ax.set_ylabel(r"$\nu$ ($\mu$eV/ns)")
    ax.set_title("double-passage excited population")
    fig.tight_layout()
    return _save(fig, path, f"column={column} vmin={vmin!r} vmax={vmax!r}")


def render_kz_curve(result: SweepResult, path, alpha: float | None = None) -> Path:
    """Numeric defect density (dots) against the closed-form curve at ``alpha``."""
    x = result.column("x")
    rho = result.column("rho_numeric")
    if alpha is None:
        alpha = result.metadata.get("config", {}).get("alpha", 1.0)
    xs = np.geomspace(max(x.min(), 1e-6) / 1.5, x.max() * 1.5, 200)

    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot()
    ax.plot(x, rho, "o", color="tab:red", label="propagator")
    ax.plot(xs, kz.defect_density(alpha * xs), "-", color="k", label=rf"$2/P(\alpha x)$, $\alpha$={alpha:g}")
    fit = result.summary.get("alpha_hat")
    if fit is not None:
        ax.plot(xs, kz.defect_density(fit * xs), "--", color="tab:blue", label=rf"fit $\hat\alpha$={fit:.4g}")
    ax.set_xscale("log")
    ax.set_xlabel(r"$\tau_q/\tau_0 \;\; [4\Delta^2/\hbar\nu]$")
    ax.set_ylabel(r"$\rho_d \;\; [P_{LZ}]$")
    ax.set_ylim(0, 1.05)
    ax.legend(frameon=False)
    fig.tight_layout()
    vmin, vmax = value_range(result, "rho_numeric")
    return _save(fig, path, f"column=rho_numeric vmin={vmin!r} vmax={vmax!r}")
