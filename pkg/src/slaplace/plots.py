"""Figure rendering for sample, fit, cluster, and benchmark reports.

Everything renders through the Agg backend and writes straight to a file,
so the functions stay usable in headless runs. Each function returns the
path it wrote.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .density import SLParams, radial_integral  # noqa: E402
from .sphere import geodesic_distances  # noqa: E402

_CMAP = plt.get_cmap("tab10")


def radial_density(r, params: SLParams):
    """Density of the geodesic distance to the location, f_R(r) on [0, pi]."""
    r = np.asarray(r, dtype=float)
    i0 = radial_integral(params.p, params.sigma, order=0)
    out = np.exp(-r / params.sigma) * np.sin(r) ** (params.p - 1) / i0
    return np.where((r >= 0.0) & (r <= np.pi), out, 0.0)


def plot_radial_histogram(points, params: SLParams, path, bins: int = 40):
    """Histogram of distances to the location with the model curve overlaid."""
    d = geodesic_distances(np.asarray(points, dtype=float), params.mu)
    hi = min(np.pi, 1.1 * float(d.max()) + 1e-6)
    grid = np.linspace(0.0, hi, 400)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(d, bins=bins, range=(0.0, hi), density=True, alpha=0.6,
            color=_CMAP(0), label="sample")
    ax.plot(grid, radial_density(grid, params), color=_CMAP(3), lw=2.0,
            label=f"model (sigma={params.sigma:g})")
    ax.set_xlabel("geodesic distance to location")
    ax.set_ylabel("density")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_points(points, path, labels=None, locations=None):
    """Scatter of the sample, dispatched on ambient dimension.

    Ambient dimension 2 draws the unit circle, 3 draws a wire sphere. Higher
    dimensions have no direct scatter; returns None so callers can skip the
    figure instead of failing.
    """
    points = np.asarray(points, dtype=float)
    if points.shape[1] == 2:
        return _plot_circle(points, path, labels, locations)
    if points.shape[1] == 3:
        return _plot_sphere(points, path, labels, locations)
    return None


def _label_colors(n, labels):
    if labels is None:
        return [_CMAP(0)] * n, None
    labels = np.asarray(labels)
    uniq = sorted(set(labels.tolist()))
    index = {lab: i for i, lab in enumerate(uniq)}
    return [_CMAP(index[lab] % 10) for lab in labels], uniq


def _plot_circle(points, path, labels, locations):
    colors, _ = _label_colors(points.shape[0], labels)
    theta = np.linspace(0.0, 2.0 * np.pi, 400)
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    ax.plot(np.cos(theta), np.sin(theta), color="0.8", lw=1.0, zorder=1)
    ax.scatter(points[:, 0], points[:, 1], c=colors, s=14, zorder=2)
    if locations is not None:
        locations = np.atleast_2d(locations)
        ax.scatter(locations[:, 0], locations[:, 1], marker="*", s=220,
                   c="black", zorder=3)
    ax.set_aspect("equal")
    ax.set_xlim(-1.15, 1.15)
    ax.set_ylim(-1.15, 1.15)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _plot_sphere(points, path, labels, locations):
    colors, _ = _label_colors(points.shape[0], labels)
    fig = plt.figure(figsize=(5.5, 5.5))
    ax = fig.add_subplot(projection="3d")
    u = np.linspace(0.0, 2.0 * np.pi, 30)
    v = np.linspace(0.0, np.pi, 15)
    ax.plot_wireframe(np.outer(np.cos(u), np.sin(v)),
                      np.outer(np.sin(u), np.sin(v)),
                      np.outer(np.ones_like(u), np.cos(v)),
                      color="0.85", lw=0.4)
    ax.scatter(points[:, 0], points[:, 1], points[:, 2], c=colors, s=12)
    if locations is not None:
        locations = np.atleast_2d(locations)
        ax.scatter(locations[:, 0], locations[:, 1], locations[:, 2],
                   marker="*", s=220, c="black")
    ax.set_box_aspect((1, 1, 1))
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_trace(trace, path):
    """Log-likelihood trace across EM iterations."""
    trace = np.asarray(trace, dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(np.arange(1, trace.size + 1), trace, marker="o", ms=3.5,
            color=_CMAP(0))
    ax.set_xlabel("iteration")
    ax.set_ylabel("log likelihood")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_benchmark(series, path, ylabel: str = "mean error"):
    """Error-versus-sample-size curves, one line per labeled series.

    series maps a label to a pair (n_values, errors); both axes are drawn on
    log scale because the benchmark grids span decades.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for i, (label, (ns, errs)) in enumerate(sorted(series.items())):
        ax.plot(ns, errs, marker="o", ms=4, color=_CMAP(i % 10), label=label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("sample size")
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
