"""Render Doob-Meyer diagnostics CSVs as figures.

Two plots, both pure functions of the CSV files emitted by the
diagnostics CLI: cumulative predictable paths A_t per information
structure (one curve each), and overlaid density histograms of the
estimated conditional mean increments m-hat (shared bins, one histogram
per structure).  Nothing is recomputed here; every number plotted comes
straight out of a CSV cell.
"""
from __future__ import annotations

__version__ = "0.1.0"

import csv
from dataclasses import dataclass
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

#: shared bin count for overlaid histograms, so densities are comparable
N_BINS = 60


class FigureError(ValueError):
    """Malformed figure request: missing file, column, asset, or structure."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: which CSV, which asset, where to write the
    image, and which information structures to overlay (None = all that
    the file contains, in file order)."""

    csv_path: str
    asset: str
    out_path: str
    structures: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.structures is not None and len(self.structures) == 0:
            raise FigureError("empty structure selection")


def _read_rows(path: str, required: tuple[str, ...]) -> list[dict]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in required if c not in header]
            if missing:
                raise FigureError(f"{path}: missing columns {missing}")
            return list(reader)
    except OSError as exc:
        raise FigureError(f"cannot read {path}: {exc}") from None


def _select(rows: list[dict], spec: FigureSpec, path: str) -> dict[str, list[dict]]:
    """Rows for the requested asset, grouped by structure label in the
    requested (or file) order."""
    assets = {r["asset"] for r in rows}
    if spec.asset not in assets:
        raise FigureError(
            f"{path}: asset {spec.asset!r} not present (has {sorted(assets)})"
        )
    mine = [r for r in rows if r["asset"] == spec.asset]
    in_file: list[str] = []
    for r in mine:
        if r["filtration"] not in in_file:
            in_file.append(r["filtration"])
    wanted = list(spec.structures) if spec.structures is not None else in_file
    unknown = [s for s in wanted if s not in in_file]
    if unknown:
        raise FigureError(
            f"{path}: structures {unknown} not present (has {in_file})"
        )
    return {
        label: [r for r in mine if r["filtration"] == label] for label in wanted
    }


def load_at_series(spec: FigureSpec) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Per structure: (t, A_t) arrays for the selected asset, sorted by t."""
    rows = _read_rows(spec.csv_path, ("t", "asset", "filtration", "a_t"))
    series = {}
    for label, group in _select(rows, spec, spec.csv_path).items():
        pairs = sorted((int(r["t"]), float(r["a_t"])) for r in group)
        t = np.array([p[0] for p in pairs])
        a = np.array([p[1] for p in pairs])
        series[label] = (t, a)
    return series


def load_m_samples(spec: FigureSpec) -> dict[str, np.ndarray]:
    """Per structure: the m-hat sample vector for the selected asset."""
    rows = _read_rows(spec.csv_path, ("asset", "filtration", "m_hat"))
    return {
        label: np.array([float(r["m_hat"]) for r in group])
        for label, group in _select(rows, spec, spec.csv_path).items()
    }


def shared_bin_edges(samples: dict[str, np.ndarray], n_bins: int = N_BINS) -> np.ndarray:
    """One common bin grid spanning every overlaid sample set.  A
    degenerate range (all values equal) is widened so the single value
    lands inside a proper bin."""
    allv = np.concatenate(list(samples.values()))
    lo, hi = float(allv.min()), float(allv.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return np.linspace(lo, hi, n_bins + 1)


def histogram_summary(
    spec: FigureSpec,
) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Per structure: (density, edges) on the shared bin grid.  This is
    exactly what build_m_hist draws."""
    samples = load_m_samples(spec)
    edges = shared_bin_edges(samples)
    return {
        label: (np.histogram(v, bins=edges, density=True)[0], edges)
        for label, v in samples.items()
    }


def build_at_paths(spec: FigureSpec) -> plt.Figure:
    """One curve of A_t against t per information structure."""
    series = load_at_series(spec)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for label, (t, a) in series.items():
        ax.plot(t, a, label=label, linewidth=1.2)
    ax.axhline(0.0, color="0.7", linewidth=0.6, zorder=0)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$A_t$")
    ax.set_title(f"Cumulative predictable part, asset {spec.asset}")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


def build_m_hist(spec: FigureSpec) -> plt.Figure:
    """Overlaid density histograms of m-hat on one shared bin grid."""
    summary = histogram_summary(spec)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for label, (density, edges) in summary.items():
        ax.stairs(density, edges, label=label, linewidth=1.2)
    ax.set_xlabel(r"$\hat m_t$")
    ax.set_ylabel("density")
    ax.set_title(f"Estimated conditional mean increments, asset {spec.asset}")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


def _save(fig: plt.Figure, out_path: str) -> str:
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_at_paths(spec: FigureSpec) -> str:
    """Write the A_t figure to spec.out_path and return that path."""
    return _save(build_at_paths(spec), spec.out_path)


def plot_m_hist(spec: FigureSpec) -> str:
    """Write the m-hat histogram figure to spec.out_path and return it."""
    return _save(build_m_hist(spec), spec.out_path)
