"""Static PNG figures for report and verification runs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def field_figure(path, sample, title, reference=None):
    """Heat map of |q| (or q when real), plus the pointwise gap to a reference."""
    vals = np.asarray(sample.values)
    shown = np.abs(vals) if np.iscomplexobj(vals) else vals
    ncols = 2 if reference is not None else 1
    fig, axes = plt.subplots(1, ncols, figsize=(5.2 * ncols, 4.2), squeeze=False)
    extent = [sample.t_grid[0], sample.t_grid[-1], sample.x_grid[0], sample.x_grid[-1]]
    a0, a1 = sample.axes
    im = axes[0, 0].imshow(shown, origin="lower", aspect="auto", extent=extent, cmap="viridis")
    axes[0, 0].set_xlabel(a1)
    axes[0, 0].set_ylabel(a0)
    axes[0, 0].set_title("|q|" if np.iscomplexobj(vals) else "q")
    fig.colorbar(im, ax=axes[0, 0])
    if reference is not None:
        gap = np.abs(vals - np.asarray(reference))
        im2 = axes[0, 1].imshow(gap, origin="lower", aspect="auto", extent=extent, cmap="magma")
        axes[0, 1].set_xlabel(a1)
        axes[0, 1].set_title("|q - reference|")
        fig.colorbar(im2, ax=axes[0, 1])
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def checks_figure(path, report):
    """Each check's value against its tolerance on a log scale."""
    checks = [c for c in report.checks if c.relation == "<"]
    if not checks:
        return False
    fig, ax = plt.subplots(figsize=(7.5, 0.45 * len(checks) + 1.5))
    y = np.arange(len(checks))
    vals = np.array([max(abs(c.value), 1e-17) for c in checks])
    tols = np.array([c.tolerance for c in checks])
    colors = ["tab:green" if c.passed else "tab:red" for c in checks]
    ax.barh(y, vals, color=colors)
    ax.scatter(tols, y, marker="|", s=300, color="black", label="tolerance")
    ax.set_xscale("log")
    ax.set_yticks(y)
    ax.set_yticklabels([c.name for c in checks], fontsize=8)
    ax.invert_yaxis()
    ax.legend(loc="lower right", fontsize=8)
    ax.set_title(report.title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return True


def convergence_figure(path, spacings, series, title):
    """Log-log residual against grid spacing, with a second-order guide line."""
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    h = np.asarray(spacings, dtype=float)
    for label, vals in series.items():
        ax.loglog(h, vals, "o-", label=label)
    first = next(iter(series.values()))
    ax.loglog(h, first[0] * (h / h[0]) ** 2, "k--", lw=0.8, label="slope 2")
    ax.set_xlabel("grid spacing")
    ax.set_ylabel("residual")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def scattering_figure(path, k, a, b):
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    ax.plot(k, np.abs(a), label="|a|")
    ax.plot(k, np.abs(b), label="|b|")
    ax.plot(k, np.abs(a) ** 2 - np.abs(b) ** 2, "--", label="|a|^2 - |b|^2")
    ax.set_xlabel("k")
    ax.legend(fontsize=8)
    ax.set_title("scattering functions")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
