"""Figures written next to the JSON/CSV output of a task."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .report import VerificationReport  # noqa: E402


def _columns(report: VerificationReport, name: str):
    header, rows = report.series[name]
    return {h: [r[i] for r in rows] for i, h in enumerate(header)}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _omega_trace(report, out):
    c = _columns(report, "omega_trace")
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(c["theta"], c["dirichlet"], label="Dirichlet trace")
    ax.plot(c["theta"], c["neumann"], label="Neumann trace")
    ax.set_xlabel("theta")
    ax.legend()
    ax.set_title("omega on the rescaled disk")
    return _save(fig, out / f"{report.task}_omega_trace.png")


def _spectrum(report, out):
    c = _columns(report, "spectrum")
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for bc, marker in (("neumann", "o"), ("dirichlet", "s")):
        idx = [i for i, b in enumerate(c["bc"]) if b == bc]
        ax.plot([c["index"][i] for i in idx], [c["bessel_table"][i] for i in idx], marker, mfc="none",
                label=f"{bc} (Bessel roots)")
        ax.plot([c["index"][i] for i in idx], [c["eigenvalue_scaled"][i] for i in idx], "k.", ms=4)
    ax.set_xlabel("index")
    ax.set_ylabel("eigenvalue x radius^2")
    ax.legend()
    return _save(fig, out / f"{report.task}_spectrum.png")


def _gram(report, out):
    c = _columns(report, "gram_spectrum")
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(c["index"], c["eigenvalue"])
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xlabel("index")
    ax.set_ylabel("Gram eigenvalue")
    ax.set_title(report.task)
    return _save(fig, out / f"{report.task}_gram_spectrum.png")


def _scan(report, out):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for name, style in (("scan", "o-"), ("disk_scan", "s--")):
        if name in report.series:
            c = _columns(report, name)
            ax.semilogy(c["index"], np.maximum(c["residual"], 1e-17), style, label=name.replace("_", " "))
    ax.set_xlabel("index k")
    ax.set_ylabel("boundary constancy residual")
    ax.legend()
    return _save(fig, out / f"{report.task}_residuals.png")


def _traces(report, out):
    c = _columns(report, "traces")
    fig, axes = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    for key in c:
        if key.endswith("_dirichlet"):
            axes[0].plot(c["s"], c[key], label=key[:-10])
        elif key.endswith("_neumann"):
            axes[1].plot(c["s"], c[key], label=key[:-8])
    axes[0].set_ylabel("Dirichlet")
    axes[1].set_ylabel("Neumann")
    axes[1].set_xlabel("arclength")
    axes[0].legend(fontsize=7)
    return _save(fig, out / f"{report.task}_traces.png")


def _nodal(report, out):
    fields = report.artifacts
    fig, axes = plt.subplots(1, len(fields), figsize=(3 * len(fields), 3))
    for ax, (name, f) in zip(np.atleast_1d(axes), fields.items()):
        v = np.where(f.mask, f.values, np.nan)
        lim = np.nanmax(np.abs(v))
        ax.pcolormesh(f.x, f.y, v, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="auto")
        ax.contour(f.x, f.y, np.where(f.mask, f.values, np.nan), levels=[0.0], colors="k", linewidths=0.8)
        ax.plot(f.curve.x, f.curve.y, "k-", lw=0.8)
        ax.set_aspect("equal")
        ax.set_title(name, fontsize=8)
        ax.set_axis_off()
    return _save(fig, out / f"{report.task}_nodal.png")


_PLOTS = {
    "omega_trace": _omega_trace,
    "spectrum": _spectrum,
    "gram_spectrum": _gram,
    "scan": _scan,
    "traces": _traces,
}


def write_figures(report: VerificationReport, out_dir) -> list[Path]:
    """Render whatever the report carries; returns the PNG paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [fn(report, out) for name, fn in _PLOTS.items() if name in report.series]
    if report.artifacts:
        paths.append(_nodal(report, out))
    return paths
