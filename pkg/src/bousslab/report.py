"""CSV and figure emission for runs, fits and classification tables.

Float formatting uses repr (shortest round-trip), so re-running a command with
identical configuration reproduces the CSV files byte for byte.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .decay import DecayFit, NormSeries

NORMS_HEADER = "t,l2_uv,linf_uv,h1_uv,l2_etaw,boundary_monitor,linf_sum"
FIT_HEADER = "preset,diss,norm,r,C,plateau"
CLASSIFY_HEADER = "preset,diss,klass,delta_m,delta_M,resonance"
SWEEP_HEADER = "run,params,preset,diss,norm,r,C,plateau,error"


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def norms_csv_text(series: NormSeries) -> str:
    lines = [NORMS_HEADER]
    for i in range(len(series)):
        lines.append(",".join(fmt(v) for v in (
            series.t[i], series.l2_uv[i], series.linf_uv[i], series.h1_uv[i],
            series.l2_etaw[i], series.boundary[i], series.linf_sum[i])))
    return "\n".join(lines) + "\n"


def fit_csv_text(rows) -> str:
    """rows: iterable of (preset, diss, norm, DecayFit)."""
    lines = [FIT_HEADER]
    for preset, diss, norm, f in rows:
        lines.append(",".join((str(preset), str(diss), str(norm),
                               fmt(f.r), fmt(f.C), str(int(f.plateau)))))
    return "\n".join(lines) + "\n"


def classify_csv_text(rows) -> str:
    """rows: iterable of (preset, diss, Classification)."""
    lines = [CLASSIFY_HEADER]
    for preset, diss, cl in rows:
        res = "" if cl.resonance is None else fmt(cl.resonance)
        lines.append(",".join((str(preset), str(diss), cl.klass.value,
                               fmt(cl.delta_m), fmt(cl.delta_M), res)))
    return "\n".join(lines) + "\n"


def write_text(path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def decay_figure(path, series: NormSeries, fits: dict[str, DecayFit],
                 title: str = "") -> None:
    """Log-log norm history with the fitted power laws overlaid."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    mask = series.t > 0
    t = series.t[mask]
    styles = {"l2_uv": "o", "linf_uv": "s"}
    for key, marker in styles.items():
        v = series.column(key)[mask]
        ax.loglog(t, v, marker, ms=3.5, lw=0, label=key)
        f = fits.get(key)
        if f is not None and t.size:
            ax.loglog(t, f.C * t ** (-f.r), "-", lw=1.2,
                      label=f"{f.C:.4g} t^-{f.r:.4g}")
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    if t.size:
        ax.legend(fontsize=8)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
