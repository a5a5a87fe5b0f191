"""Figure rendering for the CLI report path.

Each renderer takes the report document (plus flat rows) and writes PNG
files next to the delimited output; all take and return plain data so
they stay trivially testable.
"""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGSIZE = (6.0, 3.8)


def _save(fig, outdir: str, name: str) -> str:
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, name)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def _semilog_bars(ax, xs, ys, label):
    ys = np.asarray(ys, float)
    ax.semilogy(xs, np.maximum(ys, 1e-300), "o-", ms=4, label=label)


def plot_pswf(doc, rows, outdir, stem):
    paths = []
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ks = [r["k"] for r in rows]
    ax.plot(ks, [r["alpha"] for r in rows], "o-", ms=4)
    ax.set_xlabel("k")
    ax.set_ylabel(r"prolate eigenvalue $\alpha_k$")
    ax.set_title(f"prolate spectrum, c={doc['config'].get('c')}")
    paths.append(_save(fig, outdir, f"{stem}_spectrum.png"))
    fig, ax = plt.subplots(figsize=FIGSIZE)
    _semilog_bars(ax, ks, [r["lam"] for r in rows], r"$\lambda_k$")
    ax.set_xlabel("k")
    ax.set_ylabel("concentration")
    ax.legend()
    paths.append(_save(fig, outdir, f"{stem}_concentration.png"))
    record = doc["records"][0]
    if record.get("grid"):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        grid = np.array(record["grid"])
        for k, values in enumerate(record["values"][:6]):
            ax.plot(grid, values, lw=1.0, label=f"k={k}")
        ax.set_xlabel("x")
        ax.set_ylabel(r"$\psi_k(x)$")
        ax.legend(ncol=3, fontsize=8)
        paths.append(_save(fig, outdir, f"{stem}_eigenfunctions.png"))
    return paths


def plot_spectrum(doc, rows, outdir, stem):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ks = [r["k"] for r in rows]
    ax.plot(ks, [r["alpha_w"] for r in rows], "o-", ms=4, label=r"$-W$")
    ax.plot(ks, [r["alpha_l"] for r in rows], "s--", ms=4, label=r"$-L$")
    cfg = doc["config"]
    ax.set_xlabel("k")
    ax.set_ylabel("eigenvalue")
    ax.set_title(f"sector d={cfg.get('d')} l={cfg.get('l')} c={cfg.get('c')}")
    ax.legend()
    return [_save(fig, outdir, f"{stem}_spectrum.png")]


def plot_commutator(doc, rows, outdir, stem):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ks = [r["k"] for r in rows]
    _semilog_bars(ax1, ks, [r["residual"] for r in rows], "alignment residual")
    ax1.set_xlabel("k")
    ax1.legend()
    _semilog_bars(ax2, ks, [r["lam"] for r in rows], r"$\lambda(k)$")
    ax2.set_xlabel("k")
    ax2.legend()
    fig.suptitle(f"commutation certificate d={doc['config'].get('d')} c={doc['config'].get('c')}")
    return [_save(fig, outdir, f"{stem}_certificate.png")]


def plot_entropy(doc, rows, outdir, stem):
    keep = rows[:12]
    names = [r["function"] for r in keep]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(keep)), 4.0))
    xs = np.arange(len(keep))
    width = 0.2
    for i, key in enumerate(("born", "parabolic", "legendre", "prolate")):
        ax.bar(xs + (i - 1.5) * width, [r[key] for r in keep], width, label=key)
    ax.set_xticks(xs)
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=7)
    ax.set_ylabel("entropy")
    ax.legend()
    return [_save(fig, outdir, f"{stem}_entropies.png")]


def plot_wave(doc, rows, outdir, stem):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    keys = ("legendre_term", "parabolic_term", "lower_order_term", "entropy")
    for i, row in enumerate(rows):
        ax.bar(np.arange(len(keys)) + i * 0.25, [row[k] for k in keys], 0.25)
    ax.set_xticks(np.arange(len(keys)))
    ax.set_xticklabels(["legendre(f)", "parabolic(g)", "2πD||f||^2", "total"])
    ax.set_ylabel("entropy")
    return [_save(fig, outdir, f"{stem}_wave.png")]


def plot_modular(doc, rows, outdir, stem):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    seeds = [r["seed"] for r in rows]
    for key in ("j_squared", "jdj_vs_inverse", "flow_invariance", "cutting_agreement"):
        if rows and key in rows[0] and rows[0][key] is not None:
            _semilog_bars(ax, seeds, [r[key] for r in rows], key)
    ax.set_xlabel("seed")
    ax.set_ylabel("residual")
    ax.legend(fontsize=7)
    return [_save(fig, outdir, f"{stem}_residuals.png")]


def plot_duality(doc, rows, outdir, stem):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    seeds = [r["seed"] for r in rows]
    for key in ("logdelta_offdiag_mass", "a_diag_mass", "adjoint_residual", "mu_relation_residual"):
        _semilog_bars(ax, seeds, [max(r[key], 1e-18) for r in rows], key)
    ax.set_xlabel("seed")
    ax.set_ylabel("residual / mass")
    ax.legend(fontsize=7)
    return [_save(fig, outdir, f"{stem}_blocks.png")]


SWEEP_METRICS = {
    "commutator": "lam",
    "spectrum": "alpha_w",
    "pswf": "lam",
    "entropy": "prolate",
    "wave": "entropy",
}


def plot_sweep(doc, rows, outdir, stem):
    axes = doc["config"].get("ranges", [])
    base = doc["config"].get("command")
    metric = SWEEP_METRICS.get(base)
    if not axes or metric is None or not rows:
        return []
    axis = axes[0].split("=")[0]
    picked = {}
    for row in rows:
        if metric not in row or axis not in row:
            continue
        picked.setdefault(row[axis], row[metric])
    if not picked:
        return []
    fig, ax = plt.subplots(figsize=FIGSIZE)
    xs = list(picked)
    ax.plot(xs, [picked[x] for x in xs], "o-")
    ax.set_xlabel(axis)
    ax.set_ylabel(f"{metric} ({base})")
    return [_save(fig, outdir, f"{stem}_sweep.png")]


RENDERERS = {
    "pswf": plot_pswf,
    "spectrum": plot_spectrum,
    "commutator": plot_commutator,
    "entropy": plot_entropy,
    "wave": plot_wave,
    "modular": plot_modular,
    "duality": plot_duality,
    "sweep": plot_sweep,
}


def render_figures(doc: dict, rows: list[dict], outdir: str, stem: str) -> list[str]:
    renderer = RENDERERS.get(doc["command"])
    if renderer is None or not rows:
        return []
    return renderer(doc, rows, outdir, stem)
