"""Render pqfi sweep CSVs into the six canned figures.

The renderer consumes only the CSV grid and its JSON manifest; it never
recomputes any channel quantity.  Output is deterministic: fixed canvas,
fixed hash salt for SVG ids, no timestamps in the image metadata.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "pqfi-render"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402

__all__ = ["RenderError", "FigureJob", "RenderResult", "render"]

META_COLUMNS = ("law", "j_twice", "d", "n", "lambda", "theta")

LAW_LABEL = {
    "pancharatnam": "linear law (u_k = k)",
    "symmetric": "zero-sum law",
    "fractional": "fractional law",
    "explicit": "explicit law",
}

MARKER_STYLE = {
    "theta_t": dict(color="tab:green", linestyle=":"),
    "theta_perp": dict(color="tab:purple", linestyle="--"),
    "theta_par": dict(color="tab:red", linestyle="-."),
}

MARKER_TEX = {
    "theta_t": r"$\Theta_T$",
    "theta_perp": r"$\Theta_\perp$",
    "theta_par": r"$\Theta_\parallel$",
}


class RenderError(RuntimeError):
    """CSV/manifest malformed or inconsistent with the requested figure."""


@dataclass(frozen=True)
class FigureJob:
    csv_path: str
    manifest_path: str
    figure_id: int
    out_path: str


@dataclass
class Table:
    """Columnar CSV contents with NA parsed to NaN."""

    columns: dict[str, np.ndarray]

    def panel(self, **filters) -> "Table":
        mask = np.ones(len(self), dtype=bool)
        for key, value in filters.items():
            mask &= self.columns[key] == value
        return Table({k: v[mask] for k, v in self.columns.items()})

    def unique(self, key: str):
        seen = []
        for v in self.columns[key]:
            if v not in seen:
                seen.append(v)
        return seen

    def __len__(self) -> int:
        return len(next(iter(self.columns.values())))


@dataclass
class RenderResult:
    paths: list[str]
    markers: dict[str, list[tuple[str, float]]] = field(default_factory=dict)


def _parse_cell(text: str) -> float:
    return math.nan if text == "NA" else float(text)


def load_table(csv_path: str) -> Table:
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise RenderError(f"{csv_path} is empty") from None
        rows = list(reader)
    if not rows:
        raise RenderError(f"{csv_path} has a header but no data rows")
    for col in META_COLUMNS:
        if col not in header:
            raise RenderError(f"{csv_path} lacks required column {col!r}")
    columns: dict[str, np.ndarray] = {}
    for idx, name in enumerate(header):
        if name == "law":
            columns[name] = np.array([r[idx] for r in rows])
        elif name in ("j_twice", "d", "n"):
            columns[name] = np.array([int(r[idx]) for r in rows])
        else:
            columns[name] = np.array([_parse_cell(r[idx]) for r in rows])
    return Table(columns)


def load_manifest(manifest_path: str) -> dict:
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise RenderError(f"manifest {manifest_path} not found") from None
    except json.JSONDecodeError as exc:
        raise RenderError(f"manifest {manifest_path} is not valid JSON: {exc}") from None


def _require_columns(table: Table, names: tuple[str, ...], figure_id: int) -> None:
    missing = [n for n in names if n not in table.columns]
    if missing:
        raise RenderError(f"fig{figure_id} needs columns {missing} not present in the CSV")


def _landmark_markers(manifest: dict, law: str) -> list[tuple[str, float]]:
    for block in manifest.get("landmarks", []):
        if block.get("law") == law:
            return [
                (key, block[key])
                for key in ("theta_t", "theta_perp", "theta_par")
                if block.get(key) is not None
            ]
    return []


def _draw_markers(ax, markers: list[tuple[str, float]]) -> None:
    for name, value in markers:
        line = ax.axvline(value, linewidth=1.0, **MARKER_STYLE[name])
        line.set_gid(f"landmark-{name}")
        ax.text(
            value,
            0.98,
            MARKER_TEX[name],
            transform=ax.get_xaxis_transform(),
            ha="left",
            va="top",
            fontsize=8,
            color=MARKER_STYLE[name]["color"],
        )


def _spin_label(j_twice: int) -> str:
    return f"j = {j_twice}/2" if j_twice % 2 else f"j = {j_twice // 2}"


def _fig1(table: Table, manifest: dict, fig) -> dict:
    _require_columns(table, ("T",), 1)
    laws = table.unique("law")
    spins = table.unique("j_twice")
    axes = fig.subplots(len(laws), len(spins), squeeze=False)
    for r, law in enumerate(laws):
        for c, tj in enumerate(spins):
            panel = table.panel(law=law, j_twice=tj)
            lam = np.array(panel.unique("lambda"))
            theta = np.array(panel.unique("theta"))
            grid = panel.columns["T"].reshape(len(lam), len(theta))
            ax = axes[r][c]
            mesh = ax.pcolormesh(
                lam,
                theta,
                np.ma.masked_invalid(grid).T,
                shading="nearest",
                cmap="viridis",
                rasterized=True,
            )
            ax.set_xscale("log")
            ax.set_title(f"{LAW_LABEL.get(law, law)}, {_spin_label(tj)}", fontsize=9)
            if r == len(laws) - 1:
                ax.set_xlabel(r"$\lambda$")
            if c == 0:
                ax.set_ylabel(r"$\Theta$")
            fig.colorbar(mesh, ax=ax, label=r"$\mathcal{T}/n^2$")
    return {}


def _fig2(table: Table, manifest: dict, fig) -> dict:
    _require_columns(table, ("P", "Iperp"), 2)
    ax_p, ax_i = fig.subplots(1, 2)
    for tj in table.unique("j_twice"):
        panel = table.panel(j_twice=tj)
        theta = panel.columns["theta"]
        ax_p.plot(theta, panel.columns["P"], label=_spin_label(tj))
        ax_i.plot(theta, panel.columns["Iperp"], label=_spin_label(tj))
    ax_p.set_xlabel(r"$\Theta$")
    ax_p.set_ylabel(r"$\mathcal{P}$")
    ax_p.set_yscale("log")
    ax_p.set_title("postselection probability")
    ax_i.set_xlabel(r"$\Theta$")
    ax_i.set_ylabel(r"$\mathcal{I}^\perp/n^2$")
    ax_i.set_yscale("log")
    ax_i.set_title("observable QFI")
    ax_p.legend(fontsize=8)
    ax_i.legend(fontsize=8)
    return {}


def _component_axes(ax, panel: Table) -> None:
    theta = panel.columns["theta"]
    ax.plot(theta, panel.columns["IT"], label=r"$\mathcal{I}^T/n^2$", color="tab:blue")
    ax.plot(theta, panel.columns["Ipar"], label=r"$\mathcal{I}^\parallel/n^2$", color="tab:orange")
    ax.plot(theta, panel.columns["Iperp"], label=r"$\mathcal{I}^\perp/n^2$", color="black")
    ax.set_xlabel(r"$\Theta$")
    ax.set_yscale("log")


def _fig3(table: Table, manifest: dict, fig) -> dict:
    _require_columns(table, ("IT", "Ipar", "Iperp"), 3)
    laws = table.unique("law")
    axes = fig.subplots(1, len(laws))
    if len(laws) == 1:
        axes = [axes]
    markers_by_panel = {}
    for ax, law in zip(axes, laws):
        _component_axes(ax, table.panel(law=law))
        markers = sorted(_landmark_markers(manifest, law), key=lambda kv: kv[1])
        _draw_markers(ax, markers)
        markers_by_panel[law] = markers
        ax.set_title(LAW_LABEL.get(law, law), fontsize=10)
        ax.legend(fontsize=8)
    return markers_by_panel


def _fig4(table: Table, manifest: dict, fig) -> dict:
    _require_columns(table, ("IT", "Ipar", "Iperp"), 4)
    ax_a, ax_b, ax_c = fig.subplots(1, 3)
    dims = table.unique("d")
    _component_axes(ax_a, table.panel(law="pancharatnam", d=max(dims)))
    ax_a.set_title(f"linear law, d = {max(dims)}", fontsize=10)
    ax_a.legend(fontsize=8)
    for ax, law, title in (
        (ax_b, "pancharatnam", "linear law"),
        (ax_c, "symmetric", "zero-sum law"),
    ):
        for d in dims:
            panel = table.panel(law=law, d=d)
            ax.plot(panel.columns["theta"], panel.columns["Iperp"], label=f"d = {d}")
        ax.set_xlabel(r"$\Theta$")
        ax.set_ylabel(r"$\mathcal{I}^\perp/n^2$")
        ax.set_yscale("log")
        ax.set_title(title, fontsize=10)
        ax.legend(fontsize=8)
    return {}


def _fig5(table: Table, manifest: dict, fig) -> dict:
    _require_columns(table, ("T", "dlambda", "SNR"), 5)
    ax_t, ax_u, ax_s = fig.subplots(1, 3)
    for law in table.unique("law"):
        panel = table.panel(law=law)
        theta = panel.columns["theta"]
        label = LAW_LABEL.get(law, law)
        ax_t.plot(theta, panel.columns["T"], label=label)
        ax_u.plot(theta, panel.columns["dlambda"], label=label)
        ax_s.plot(theta, panel.columns["SNR"], label=label)
    markers = sorted(_landmark_markers(manifest, "pancharatnam"), key=lambda kv: kv[1])
    for ax, ylabel, title in (
        (ax_t, r"$\mathcal{T}/n^2$", "yield per trial"),
        (ax_u, r"$\Delta\lambda$", "estimation uncertainty"),
        (ax_s, "SNR", "signal-to-noise bound"),
    ):
        _draw_markers(ax, markers)
        ax.set_xlabel(r"$\Theta$")
        ax.set_ylabel(ylabel)
        ax.set_title(title, fontsize=10)
        ax.legend(fontsize=8)
    ax_u.set_yscale("log")
    return {"pancharatnam": markers}


def _fig6(table: Table, manifest: dict, fig) -> dict:
    _require_columns(table, ("IT", "Ipar", "Iperp"), 6)
    ax = fig.subplots()
    _component_axes(ax, table)
    law = table.unique("law")[0]
    markers = sorted(_landmark_markers(manifest, law), key=lambda kv: kv[1])
    _draw_markers(ax, markers)
    ax.set_title("fractional law: landmark coincidence", fontsize=10)
    ax.legend(fontsize=8)
    return {law: markers}


_DRAWERS = {1: _fig1, 2: _fig2, 3: _fig3, 4: _fig4, 5: _fig5, 6: _fig6}

_SIZES = {1: (12.0, 6.5), 2: (9.0, 3.6), 3: (9.0, 3.6), 4: (12.0, 3.6), 5: (12.0, 3.6), 6: (5.5, 4.0)}


def _save(fig, out_path: str) -> list[str]:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    written = []
    suffixes = [out.suffix.lower()] if out.suffix.lower() in (".png", ".svg") else [".png"]
    sibling = ".svg" if suffixes[0] == ".png" else ".png"
    suffixes.append(sibling)
    for suffix in suffixes:
        path = out.with_suffix(suffix)
        if suffix == ".png":
            fig.savefig(path, dpi=120, metadata={"Software": "pqfi-render"})
        else:
            fig.savefig(path, metadata={"Date": None})
        written.append(str(path))
    return written


def render(job: FigureJob) -> RenderResult:
    """Draw one figure from its CSV + manifest; writes PNG and SVG."""
    if job.figure_id not in _DRAWERS:
        raise RenderError(f"figure id must be in 1..6, got {job.figure_id}")
    manifest = load_manifest(job.manifest_path)
    preset = manifest.get("preset")
    if preset != f"fig{job.figure_id}":
        raise RenderError(
            f"manifest preset {preset!r} does not match requested figure {job.figure_id}"
        )
    table = load_table(job.csv_path)
    fig = plt.figure(figsize=_SIZES[job.figure_id], layout="constrained")
    try:
        markers = _DRAWERS[job.figure_id](table, manifest, fig)
        paths = _save(fig, job.out_path)
    finally:
        plt.close(fig)
    return RenderResult(paths=paths, markers=markers)
