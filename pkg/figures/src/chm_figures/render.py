"""Render pipeline reports into publication-style figures.

Consumes only the primary package's documented report JSON schema (version 1).
All numbers come from the reports; rendering is read-only and deterministic
(fixed metadata, no timestamps) so re-rendering is byte-idempotent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import Rectangle

SUPPORTED_SCHEMA = 1
FIGURE_KINDS = ("variance-profile", "corr-heatmap", "qntk-heatmap", "offdiag-vs-depth")
FORMATS = ("png", "svg", "pdf")

DIAG_GREY = "#b0b0b0"


class SchemaError(ValueError):
    """Report missing, malformed, or of an unsupported schema/kind."""


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple[str, ...]
    kind: str
    output: str
    format: str | None = None

    def resolved_format(self) -> str:
        fmt = self.format or Path(self.output).suffix.lstrip(".").lower()
        if fmt not in FORMATS:
            raise SchemaError(f"unsupported output format {fmt!r}; expected one of {FORMATS}")
        return fmt


def load_report(path, expected_kind: str | None = None) -> dict:
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"report not found: {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"report is not valid JSON: {path}: {exc}") from None
    if doc.get("schema_version") != SUPPORTED_SCHEMA:
        raise SchemaError(
            f"unsupported schema_version {doc.get('schema_version')!r} in {path}"
        )
    if expected_kind and doc.get("kind") != expected_kind:
        raise SchemaError(
            f"{path} holds a {doc.get('kind')!r} report; this figure needs {expected_kind!r}"
        )
    if "depths" not in doc or not doc["depths"]:
        raise SchemaError(f"{path} has no per-depth pipeline outputs")
    return doc


def _complex(doc: dict) -> np.ndarray:
    return np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)


def _provenance_line(report: dict) -> str:
    cfg = report["config"]
    return (
        f"{cfg['family']} R{cfg['encoder'].upper()}(x)  n={cfg['n']} L={cfg['L']}  "
        f"seed={cfg['seed']}  S={cfg['samples']}  h={cfg['hamming']}"
    )


def _stamp(ax, report: dict):
    cfg = report["config"]
    ax.text(
        0.99, 0.02, f"seed={cfg['seed']} S={cfg['samples']}",
        transform=ax.transAxes, ha="right", va="bottom", fontsize=5, color="0.35",
    )


def _save(fig, spec: FigureSpec):
    fmt = spec.resolved_format()
    path = Path(spec.output)
    path.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"png": {"Software": "chm-fig"},
                "svg": {"Date": None},
                "pdf": {"CreationDate": None}}[fmt]
    fig.savefig(path, format=fmt, dpi=150, metadata=metadata)
    plt.close(fig)


# --- variance profiles -------------------------------------------------------


def render_variance_profile(spec: FigureSpec) -> None:
    report = load_report(spec.inputs[0], "variance")
    depths = report["depths"]
    fig, ax = plt.subplots(figsize=(7, 4.2))
    colors = plt.cm.viridis(np.linspace(0.05, 0.85, len(depths)))
    floor = 1e-16
    for entry, color in zip(depths, colors):
        omega = np.array(entry["omega"])
        var_mc = np.array(entry["var_mc"], dtype=float)
        energy = np.array(entry["row_energy_c"], dtype=float)
        # log scale relative to the highest variance
        scale = max(var_mc.max(), floor)
        ax.semilogy(omega, np.maximum(var_mc / scale, floor), "o-", color=color,
                    label=f"d={entry['depth']} MC (r={entry['pearson']:.3f})")
        ax.semilogy(omega, np.maximum(energy / max(energy.max(), floor), floor), "s--",
                    color=color, alpha=0.6, label=f"d={entry['depth']} from C")
    ax.set_xlabel(r"$\omega$")
    ax.set_ylabel("variance / max variance")
    ax.set_title("Coefficient variance profiles: Monte Carlo vs row energies of C")
    ax.grid(True, which="both", alpha=0.2)
    ax.legend(fontsize=6, ncol=2)
    _stamp(ax, report)
    fig.text(0.5, 0.005, _provenance_line(report), ha="center", fontsize=6, color="0.35")
    fig.tight_layout(rect=(0, 0.02, 1, 1))
    _save(fig, spec)


# --- heatmap pair grids -------------------------------------------------------


def _heatmap(ax, matrix: np.ndarray, unmasked, labels, vmax: float):
    mat = np.abs(matrix)
    size = len(labels)
    display = mat.copy()
    np.fill_diagonal(display, np.nan)  # diagonal drawn grey below
    im = ax.imshow(display, vmin=0.0, vmax=vmax, cmap="magma", interpolation="nearest")
    for i in range(size):
        ax.add_patch(Rectangle((i - 0.5, i - 0.5), 1, 1, color=DIAG_GREY, zorder=3))
    for i, keep in enumerate(unmasked):
        if keep:
            continue
        # hatched masked row and column
        ax.add_patch(Rectangle((-0.5, i - 0.5), size, 1, fill=False,
                               hatch="////", edgecolor="0.6", linewidth=0, zorder=4))
        ax.add_patch(Rectangle((i - 0.5, -0.5), 1, size, fill=False,
                               hatch="////", edgecolor="0.6", linewidth=0, zorder=4))
    step = max(1, size // 5)
    ticks = list(range(0, size, step))
    ax.set_xticks(ticks, [labels[i] for i in ticks], fontsize=6)
    ax.set_yticks(ticks, [labels[i] for i in ticks], fontsize=6)
    return im


def _render_heatmap_grid(spec: FigureSpec, kind: str, matrix_keys, row_titles, metric_text):
    report = load_report(spec.inputs[0], kind)
    depths = report["depths"]
    n_cols = len(depths)
    fig, axes = plt.subplots(2, n_cols, figsize=(2.4 * n_cols + 1.2, 5.6), squeeze=False)
    for col, entry in enumerate(depths):
        top = _complex(entry[matrix_keys[0]])
        bottom = _complex(entry[matrix_keys[1]])
        unmasked = entry.get("unmasked_joint", [True] * len(entry["omega"]))
        # colour scale set by the off-diagonal values across the pair
        off = []
        for mat in (top, bottom):
            o = np.abs(mat).copy()
            np.fill_diagonal(o, 0.0)
            off.append(o.max())
        vmax = max(max(off), 1e-12)
        labels = entry["omega"]
        im = _heatmap(axes[0][col], top, unmasked, labels, vmax)
        _heatmap(axes[1][col], bottom, unmasked, labels, vmax)
        axes[0][col].set_title(f"d={entry['depth']}\n{metric_text(entry)}", fontsize=7)
        fig.colorbar(im, ax=[axes[0][col], axes[1][col]], shrink=0.75, pad=0.02).ax.tick_params(labelsize=6)
        for ax in (axes[0][col], axes[1][col]):
            _stamp(ax, report)
    axes[0][0].set_ylabel(row_titles[0], fontsize=8)
    axes[1][0].set_ylabel(row_titles[1], fontsize=8)
    fig.suptitle(_provenance_line(report), fontsize=8)
    _save(fig, spec)


def render_corr_heatmap(spec: FigureSpec) -> None:
    def metric_text(entry):
        m = entry["metrics"]
        return (
            rf"$\varepsilon_F$={m['frobenius_error']:.3f} "
            rf"$\mathcal{{A}}$={m['cosine_similarity']:.3f}"
            + "\n"
            + f"offdiag C={m['mean_offdiag_c']:.3f} MC={m['mean_offdiag_mc']:.3f}"
        )

    _render_heatmap_grid(
        spec, "correlation", ("corr_c", "corr_mc"),
        ("|Corr| from C", "|Corr| Monte Carlo"), metric_text,
    )


def render_qntk_heatmap(spec: FigureSpec) -> None:
    def metric_text(entry):
        m = entry["metrics"]
        return (
            rf"$\varepsilon_F$={m['frobenius_error']:.3f} "
            rf"$\mathcal{{A}}$={m['cosine_similarity']:.3f}"
            + "\n"
            + rf"$\mathcal{{A}}$ vs Corr={m['cosine_vs_corr']:.3f}"
        )

    _render_heatmap_grid(
        spec, "qntk", ("h_c_normalised", "h_mc_normalised"),
        (r"$|\bar H|$ from C (normalised)", r"$|\bar H|$ Monte Carlo (normalised)"),
        metric_text,
    )


# --- mean off-diagonal vs depth -----------------------------------------------


def render_offdiag_vs_depth(spec: FigureSpec) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    reports = [load_report(path, "correlation") for path in spec.inputs]
    colors = plt.cm.tab10(np.linspace(0, 1, max(len(reports), 2)))
    for report, color in zip(reports, colors):
        cfg = report["config"]
        label = f"{cfg['family']} R{cfg['encoder'].upper()}"
        depths = [d["depth"] for d in report["depths"]]
        ax.plot(depths, [d["metrics"]["mean_offdiag_c"] for d in report["depths"]],
                "s--", color=color, alpha=0.6, label=f"{label} (from C)")
        ax.plot(depths, [d["metrics"]["mean_offdiag_mc"] for d in report["depths"]],
                "o-", color=color, label=f"{label} (MC)")
    ax.set_yscale("log")
    ax.set_xlabel("training-block depth d")
    ax.set_ylabel("mean |off-diagonal| correlation")
    ax.set_title("Mean off-diagonal correlation vs depth")
    ax.grid(True, which="both", alpha=0.2)
    ax.legend(fontsize=6)
    for report in reports:
        cfg = report["config"]
        _stamp(ax, report)
    fig.text(0.5, 0.005, "; ".join(_provenance_line(r) for r in reports[:2]),
             ha="center", fontsize=5, color="0.35")
    fig.tight_layout(rect=(0, 0.02, 1, 1))
    _save(fig, spec)


_RENDERERS = {
    "variance-profile": render_variance_profile,
    "corr-heatmap": render_corr_heatmap,
    "qntk-heatmap": render_qntk_heatmap,
    "offdiag-vs-depth": render_offdiag_vs_depth,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure; returns the written path."""
    if spec.kind not in FIGURE_KINDS:
        raise SchemaError(f"unknown figure kind {spec.kind!r}; expected one of {FIGURE_KINDS}")
    if not spec.inputs:
        raise SchemaError("at least one input report is required")
    spec.resolved_format()
    _RENDERERS[spec.kind](spec)
    return Path(spec.output)
