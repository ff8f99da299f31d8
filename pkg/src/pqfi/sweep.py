"""Deterministic parameter sweeps, figure presets, CSV and manifest output.

Every sweep emits a UTF-8, comma-separated, LF-terminated CSV with floats
printed at 17 significant digits (round-trip exact) plus a JSON manifest
recording the full configuration.  Identical configurations produce
byte-identical files.  Quantities that divide by the postselection
probability are written as the literal token NA wherever the probability
sits at or below the floor (or the value is otherwise nonfinite).
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .channel import P_FLOOR, ChannelParams, extremal_grid
from .landmarks import compute_landmarks
from .meter import MeterSpec
from .wigner import HalfInt

__all__ = [
    "ConfigError",
    "GridSpec",
    "SweepConfig",
    "run_sweep",
    "write_sweep",
    "figure_preset",
    "run_figure",
    "FIGURE_IDS",
    "worker_count",
]

QUANTITIES = ("P", "QT", "Qpar", "IT", "Ipar", "Iperp", "T", "SNR", "dlambda")

# Columns that stay numeric even where the probability is floored.
ALWAYS_FINITE = {"P", "QT", "Qpar"}

MAX_GRID_POINTS = 10_000_000

FIGURE_IDS = (1, 2, 3, 4, 5, 6)


class ConfigError(ValueError):
    """Invalid sweep configuration."""


@dataclass(frozen=True)
class GridSpec:
    """1-D grid: count points from lo to hi, linear or log spaced.

    Linear grids exclude the endpoint (periodic theta axes); log grids
    include it.  A single-point grid pins the value at lo.
    """

    lo: float
    hi: float
    count: int
    scale: str = "linear"

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigError(f"grid count must be >= 1, got {self.count}")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"grid scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and (self.lo <= 0.0 or self.hi <= 0.0):
            raise ConfigError("log grids need positive bounds")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count, endpoint=False)

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "count": self.count, "scale": self.scale}


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: a set of (law, j, d) panels over a shared (lambda, theta) grid."""

    j_list: tuple[HalfInt, ...]
    d: int
    n: int
    law: str
    lambda_grid: GridSpec
    theta_grid: GridSpec
    outputs: tuple[str, ...] = QUANTITIES
    trials: int = 1
    eps: float | None = None
    u_list: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        for q in self.outputs:
            if q not in QUANTITIES:
                raise ConfigError(f"unknown output quantity {q!r}")
        total = len(self.j_list) * self.lambda_grid.count * self.theta_grid.count
        if total > MAX_GRID_POINTS:
            raise ConfigError(f"grid of {total} points exceeds the {MAX_GRID_POINTS} cap")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")

    def meter_spec(self) -> MeterSpec:
        if self.law == "fractional":
            return MeterSpec.fractional(self.d, self.n, eps=self.eps)
        if self.law == "explicit":
            return MeterSpec.explicit(self.u_list, self.n)
        return MeterSpec(d=self.d, n=self.n, law=self.law)

    def as_dict(self) -> dict:
        out = {
            "j_twice_list": [j.twice for j in self.j_list],
            "d": self.d,
            "n": self.n,
            "law": self.law,
            "lambda_grid": self.lambda_grid.as_dict(),
            "theta_grid": self.theta_grid.as_dict(),
            "outputs": list(self.outputs),
            "trials": self.trials,
        }
        if self.eps is not None:
            out["eps"] = self.eps
        if self.u_list is not None:
            out["u_list"] = list(self.u_list)
        return out


def worker_count() -> int:
    """Worker cap from PQFI_THREADS; defaults to serial evaluation."""
    raw = os.environ.get("PQFI_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _format(value: float) -> str:
    return format(value, ".17g")


def _panel_rows(config: SweepConfig, j: HalfInt) -> list[str]:
    spec = config.meter_spec()
    lam = config.lambda_grid.values()
    theta = config.theta_grid.values()
    grids = extremal_grid(j, spec, lam, theta, trials=config.trials)
    rows = []
    for il, lam_v in enumerate(lam):
        lam_s = _format(lam_v)
        for it, theta_v in enumerate(theta):
            cells = [config.law, str(j.twice), str(config.d), str(config.n), lam_s, _format(theta_v)]
            for q in config.outputs:
                v = grids[q][il, it]
                if q in ALWAYS_FINITE or np.isfinite(v):
                    cells.append(_format(float(v)))
                else:
                    cells.append("NA")
            rows.append(",".join(cells))
    return rows


def run_sweep(configs: list[SweepConfig]) -> str:
    """CSV text for a list of panel configurations, in the given order."""
    outputs = configs[0].outputs
    for c in configs[1:]:
        if c.outputs != outputs:
            raise ConfigError("all panels of one sweep must share the output columns")
    header = "law,j_twice,d,n,lambda,theta," + ",".join(outputs)
    lines = [header]
    jobs = [(c, j) for c in configs for j in c.j_list]
    workers = worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_panel_rows_star, jobs))
    else:
        chunks = [_panel_rows(c, j) for c, j in jobs]
    for chunk in chunks:
        lines.extend(chunk)
    return "\n".join(lines) + "\n"


def _panel_rows_star(job):
    return _panel_rows(*job)


def _manifest(configs: list[SweepConfig], extra: dict | None = None) -> dict:
    doc = {
        "tool": "pqfi",
        "version": __version__,
        "tolerances": {"p_floor": P_FLOOR},
        "panels": [c.as_dict() for c in configs],
    }
    if extra:
        doc.update(extra)
    return doc


def write_sweep(configs: list[SweepConfig], csv_path: str, extra_manifest: dict | None = None) -> str:
    """Write CSV plus its manifest; returns the manifest path."""
    text = run_sweep(configs)
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    manifest_path = manifest_path_for(csv_path)
    doc = _manifest(configs, extra_manifest)
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def manifest_path_for(csv_path: str) -> str:
    base = csv_path[:-4] if csv_path.endswith(".csv") else csv_path
    return base + ".manifest.json"


def _landmark_block(law: str, d: int, n: int, lam: float, eps: float | None = None) -> dict:
    if law == "fractional":
        spec = MeterSpec.fractional(d, n, eps=eps)
    else:
        spec = MeterSpec(d=d, n=n, law=law)
    params = ChannelParams(lam=lam, theta=0.0, j=HalfInt(1))
    lm = compute_landmarks(params, spec, partial=True)
    return {
        "law": law,
        "theta_t": lm.theta_t,
        "theta_perp": lm.theta_perp,
        "theta_par": lm.theta_par,
        "pancharatnam": lm.pancharatnam,
    }


def figure_preset(figure_id: int) -> tuple[list[SweepConfig], dict]:
    """Panel configurations and manifest extras for one canned figure.

    The presets pin the published operating points: d = 30 with weak
    coupling for the contour and qudit line figures, d = 2 for the qubit
    figures, and the fractional law at d = 10^4, eps = 1e-4 for the
    landmark-coincidence figure.
    """
    lam = 1e-3
    half = HalfInt(1)
    if figure_id == 1:
        lam_grid = GridSpec(1e-4, 1.0, 256, "log")
        theta_grid = GridSpec(0.0, 2.0 * np.pi, 256)
        outputs = ("P", "Iperp", "T")
        js = (HalfInt(1), HalfInt(2), HalfInt(3))
        configs = [
            SweepConfig(js, 30, 1, law, lam_grid, theta_grid, outputs)
            for law in ("pancharatnam", "symmetric")
        ]
        return configs, {"preset": "fig1"}
    if figure_id == 2:
        lam_grid = GridSpec(lam, lam, 1)
        theta_grid = GridSpec(0.0, 8e-3, 4096)
        outputs = ("P", "IT", "Ipar", "Iperp", "T")
        js = (HalfInt(1), HalfInt(2), HalfInt(3), HalfInt(4))
        configs = [SweepConfig(js, 2, 1, "pancharatnam", lam_grid, theta_grid, outputs)]
        return configs, {"preset": "fig2"}
    if figure_id == 3:
        lam_grid = GridSpec(lam, lam, 1)
        theta_grid = GridSpec(0.0, 4e-3, 2001)
        outputs = ("P", "IT", "Ipar", "Iperp")
        configs = [
            SweepConfig((half,), 2, 1, law, lam_grid, theta_grid, outputs)
            for law in ("pancharatnam", "symmetric")
        ]
        extras = {
            "preset": "fig3",
            "landmarks": [
                _landmark_block("pancharatnam", 2, 1, lam),
                _landmark_block("symmetric", 2, 1, lam),
            ],
        }
        return configs, extras
    if figure_id == 4:
        lam_grid = GridSpec(lam, lam, 1)
        theta_grid = GridSpec(0.0, 3e-2, 3001)
        outputs = ("IT", "Ipar", "Iperp")
        configs = []
        for law in ("pancharatnam", "symmetric"):
            for d in (2, 5, 10, 30):
                configs.append(SweepConfig((half,), d, 1, law, lam_grid, theta_grid, outputs))
        return configs, {"preset": "fig4"}
    if figure_id == 5:
        lam_grid = GridSpec(lam, lam, 1)
        theta_grid = GridSpec(0.0, 3e-2, 3001)
        outputs = ("P", "Iperp", "T", "SNR", "dlambda")
        configs = [
            SweepConfig((half,), 30, 1, law, lam_grid, theta_grid, outputs)
            for law in ("pancharatnam", "symmetric")
        ]
        extras = {"preset": "fig5", "landmarks": [_landmark_block("pancharatnam", 30, 1, lam)]}
        return configs, extras
    if figure_id == 6:
        lam_grid = GridSpec(lam, lam, 1)
        theta_grid = GridSpec(0.0, 2e-3, 4001)
        outputs = ("IT", "Ipar", "Iperp")
        configs = [
            SweepConfig(
                (half,), 10_000, 1, "fractional", lam_grid, theta_grid, outputs, eps=1e-4
            )
        ]
        extras = {
            "preset": "fig6",
            "landmarks": [_landmark_block("fractional", 10_000, 1, lam, eps=1e-4)],
        }
        return configs, extras
    raise ConfigError(f"figure id must be in 1..6, got {figure_id}")


def run_figure(figure_id: int, out_dir: str) -> tuple[str, str]:
    """Write figN.csv and figN.manifest.json into out_dir."""
    configs, extras = figure_preset(figure_id)
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"fig{figure_id}.csv")
    manifest_path = write_sweep(configs, csv_path, extras)
    return csv_path, manifest_path
