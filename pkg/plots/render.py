#!/usr/bin/env python3
"""Render figures from corrgen experiment CSVs.

Reads only the documented CSV schemas (no imports from the generator
package) and writes PNG files:

  kde-overlay   one labeled density curve per group (method, graph model,
                or data source) over the ``value`` column; Silverman
                bandwidths are printed in the image footer
  heatmap       feasibility proportion per (density, b) cell; cells where
                nothing converged are painted white
  boxplot       solve wall time per (graph model, density)

Usage:
  python plots/render.py --kind kde-overlay --in comparison.csv --out fig1.png
  python plots/render.py --kind heatmap --in feasibility.csv --out fig2.png
  python plots/render.py --kind boxplot --in timing.csv --out fig4.png

Rendering is deterministic: identical input CSVs produce identical PNGs.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

KINDS = ("kde-overlay", "heatmap", "boxplot")

REQUIRED_COLUMNS = {
    "kde-overlay": {"value"},
    "heatmap": {"density", "b", "proportion"},
    "boxplot": {"graph_model", "density", "wall_time_s"},
}

GROUP_CANDIDATES = ("method", "graph_model", "source")

PNG_METADATA = {"Software": "corrgen-plots"}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_csv: str
    output_path: str
    group_by: str | None = None
    title: str | None = None


class SchemaError(ValueError):
    pass


def load_table(path: str, kind: str) -> pd.DataFrame:
    df = pd.read_csv(path, comment="#")
    missing = REQUIRED_COLUMNS[kind] - set(df.columns)
    if missing:
        raise SchemaError(
            f"{path} lacks columns {sorted(missing)} required by {kind}; "
            f"found {sorted(df.columns)}"
        )
    return df


def silverman_bandwidth(x: np.ndarray) -> float:
    """Silverman's rule of thumb for a 1-d Gaussian KDE."""
    n = len(x)
    sd = float(np.std(x, ddof=1)) if n > 1 else 1.0
    iqr = float(np.subtract(*np.percentile(x, [75, 25])))
    scale = min(sd, iqr / 1.349) if iqr > 0 else sd
    if scale <= 0:
        scale = max(abs(float(np.mean(x))), 1.0)
    return 0.9 * scale * n ** (-1 / 5)


def gaussian_kde_curve(x: np.ndarray, grid: np.ndarray, bw: float) -> np.ndarray:
    z = (grid[:, None] - x[None, :]) / bw
    return np.exp(-0.5 * z * z).sum(axis=1) / (len(x) * bw * math.sqrt(2 * math.pi))


def pick_group_column(df: pd.DataFrame, requested: str | None) -> str | None:
    if requested:
        if requested not in df.columns:
            raise SchemaError(f"group column {requested!r} not in {sorted(df.columns)}")
        return requested
    for cand in GROUP_CANDIDATES:
        if cand in df.columns and df[cand].nunique() > 1:
            return cand
    for cand in GROUP_CANDIDATES:
        if cand in df.columns:
            return cand
    return None


def render_kde_overlay(spec: FigureSpec) -> None:
    df = load_table(spec.input_csv, spec.kind)
    df = df[np.isfinite(df["value"])]
    if df.empty:
        raise SchemaError(f"{spec.input_csv} has no finite values to plot")
    group = pick_group_column(df, spec.group_by)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    lo, hi = float(df["value"].min()), float(df["value"].max())
    pad = 0.1 * max(hi - lo, 1e-3)
    grid = np.linspace(lo - pad, hi + pad, 512)
    footer = []
    labels = sorted(df[group].unique()) if group else [None]
    for label in labels:
        vals = df["value"] if label is None else df.loc[df[group] == label, "value"]
        x = vals.to_numpy(dtype=float)
        bw = silverman_bandwidth(x)
        ax.plot(grid, gaussian_kde_curve(x, grid, bw), label=str(label) if label else "values")
        footer.append(f"{label if label else 'values'}: h={bw:.4g}")
    ax.set_xlabel("correlation entry")
    ax.set_ylabel("density")
    ax.legend()
    ax.set_title(spec.title or "Distribution of nonzero off-diagonal entries")
    fig.text(0.01, 0.005, "Silverman KDE bandwidths  " + "; ".join(footer), fontsize=6)
    fig.tight_layout(rect=(0, 0.02, 1, 1))
    fig.savefig(spec.output_path, dpi=130, metadata=PNG_METADATA)
    plt.close(fig)


def heatmap_grid(df: pd.DataFrame) -> tuple[np.ndarray, list[float], list[float]]:
    """Pivot feasibility rows into a (density x b) masked proportion grid;
    cells with proportion 0 are masked (rendered white)."""
    dens = sorted(df["density"].unique())
    bs = sorted(df["b"].unique())
    grid = np.full((len(dens), len(bs)), np.nan)
    for _, row in df.iterrows():
        grid[dens.index(row["density"]), bs.index(row["b"])] = row["proportion"]
    masked = np.ma.masked_where(~np.isfinite(grid) | (grid == 0.0), grid)
    return masked, dens, bs


def render_heatmap(spec: FigureSpec) -> None:
    df = load_table(spec.input_csv, spec.kind)
    masked, dens, bs = heatmap_grid(df)
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_bad("white")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    im = ax.imshow(
        masked,
        origin="lower",
        aspect="auto",
        cmap=cmap,
        vmin=0.0,
        vmax=1.0,
        extent=(-0.5, len(bs) - 0.5, -0.5, len(dens) - 0.5),
    )
    ax.set_xticks(range(len(bs)), [f"{b:g}" for b in bs])
    ax.set_yticks(range(len(dens)), [f"{d:g}" for d in dens])
    ax.set_xlabel("mean bound b")
    ax.set_ylabel("graph density d")
    ax.set_title(spec.title or "Proportion of solved instances (white: none)")
    fig.colorbar(im, ax=ax, label="proportion")
    fig.tight_layout()
    fig.savefig(spec.output_path, dpi=130, metadata=PNG_METADATA)
    plt.close(fig)


def render_boxplot(spec: FigureSpec) -> None:
    df = load_table(spec.input_csv, spec.kind)
    groups = []
    labels = []
    for model in sorted(df["graph_model"].unique()):
        for d in sorted(df.loc[df["graph_model"] == model, "density"].unique()):
            sel = df[(df["graph_model"] == model) & (df["density"] == d)]
            groups.append(sel["wall_time_s"].to_numpy(dtype=float))
            labels.append(f"{model}\nd={d:g}")
    fig, ax = plt.subplots(figsize=(max(7, 0.6 * len(groups)), 4.5))
    ax.boxplot(groups, tick_labels=labels)
    ax.set_ylabel("solve wall time (s)")
    ax.set_title(spec.title or "Solve time per graph model and density")
    ax.tick_params(axis="x", labelsize=7)
    fig.tight_layout()
    fig.savefig(spec.output_path, dpi=130, metadata=PNG_METADATA)
    plt.close(fig)


RENDERERS = {
    "kde-overlay": render_kde_overlay,
    "heatmap": render_heatmap,
    "boxplot": render_boxplot,
}


def render(spec: FigureSpec) -> None:
    if spec.kind not in RENDERERS:
        raise SchemaError(f"unknown figure kind {spec.kind!r}")
    RENDERERS[spec.kind](spec)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="input_csv", required=True)
    parser.add_argument("--out", dest="output_path", required=True)
    parser.add_argument("--group-by", dest="group_by")
    parser.add_argument("--title")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        input_csv=args.input_csv,
        output_path=args.output_path,
        group_by=args.group_by,
        title=args.title,
    )
    try:
        render(spec)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {spec.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
