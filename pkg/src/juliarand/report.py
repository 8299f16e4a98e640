"""File artifacts: CSV tables, schema-versioned JSON, pixmaps, figures.

Everything that leaves the process as a file is produced here, so the
formats live in one place. JSON reports carry a schema identifier and
deliberately exclude wall-clock timings; those go to the CSV `time` column,
which is documented as machine-dependent. That split keeps JSON output
byte-identical across runs and thread counts for a fixed seed.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ._util import format_float
from .ergodic import ExperimentReport
from .lattice import BorelCover, Lattice
from .selector import PseudoPoint
from .transfer import DensityResult, DimensionEstimate

SAMPLE_REPORT_SCHEMA_ID = "juliarand/sample-report/v1"

_POINT_SCHEMA = {
    "type": "object",
    "required": ["row", "beta_sq", "normalized", "p_used", "trajectory_head"],
    "properties": {
        "row": {"type": "integer", "minimum": 0},
        "beta_sq": {"type": "number"},
        "normalized": {"type": "number"},
        "p_used": {"type": "integer", "minimum": 1},
        "trajectory_head": {
            "type": "array",
            "maxItems": 10,
            "items": {
                "type": "array",
                "prefixItems": [{"type": "number"}, {"type": "number"}],
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
    "additionalProperties": False,
}

SAMPLE_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": SAMPLE_REPORT_SCHEMA_ID,
    "type": "object",
    "required": [
        "schema", "params", "g", "reference_integral",
        "mu", "sigma", "complete", "trials",
    ],
    "properties": {
        "schema": {"const": SAMPLE_REPORT_SCHEMA_ID},
        "params": {
            "type": "object",
            "required": [
                "c", "m_cover", "ell", "N", "n", "alpha",
                "h", "h_mode", "seed", "tol_density",
            ],
            "properties": {
                "c": {
                    "type": "array",
                    "prefixItems": [{"type": "number"}, {"type": "number"}],
                    "minItems": 2,
                    "maxItems": 2,
                },
                "m_cover": {"type": "integer", "minimum": 0},
                "ell": {"type": "integer", "minimum": 1},
                "N": {"type": "integer", "minimum": 0},
                "n": {"type": "integer", "minimum": 1},
                "alpha": {"type": "integer", "minimum": 1},
                "h": {"type": "number"},
                "h_mode": {"enum": ["fixed", "auto"]},
                "seed": {"type": "integer", "minimum": 0},
                "tol_density": {"type": "number"},
                "tol_h": {"type": ["number", "null"]},
                "threshold": {"type": ["number", "null"]},
                "p_max": {"type": ["integer", "null"]},
            },
        },
        "g": {"type": "string"},
        "reference_integral": {"type": "number"},
        "mu": {"type": "number"},
        "sigma": {"type": "number"},
        "complete": {"type": "boolean"},
        "trials": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["seed", "average", "point", "error"],
                "properties": {
                    "seed": {"type": "integer"},
                    "average": {"type": "number"},
                    "point": {
                        "oneOf": [_POINT_SCHEMA, {"type": "null"}],
                    },
                    "error": {"type": ["string", "null"]},
                },
            },
        },
    },
}

SCHEMAS = {SAMPLE_REPORT_SCHEMA_ID: SAMPLE_REPORT_SCHEMA}


# ---------------------------------------------------------------- CSV

def write_cover_csv(path: str | Path, cover: BorelCover) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["center", "re", "im"])
        for i, z in enumerate(cover.centers):
            w.writerow([i, format_float(z.real), format_float(z.imag)])
    return path


def write_lattice_csv(path: str | Path, lat: Lattice) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "step", "re", "im"])
        for i in range(lat.ell):
            for j in range(lat.depth + 1):
                z = lat.rows[i, j]
                w.writerow([i, j, format_float(z.real), format_float(z.imag)])
    return path


def write_dimension_csv(path: str | Path, est: DimensionEstimate) -> Path:
    """Level table for every bisection candidate: h, n, f_n, ratio."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["h", "n", "f_n", "ratio"])
        for cand in est.candidates:
            for n, val, ratio in cand.levels:
                w.writerow([
                    format_float(cand.h), n,
                    format_float(val), format_float(ratio),
                ])
    return path


def write_sample_csv(
    path: str | Path, report: ExperimentReport, reference: float
) -> Path:
    """One summary row in the ensemble-table layout (params, mu, sigma, time)."""
    path = Path(path)
    cfg = report.config
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([
            "m", "ell", "N", "n", "alpha", "h", "c_re", "c_im", "seed",
            "reference", "mu", "sigma", "time_seconds",
        ])
        w.writerow([
            cfg.m_cover, cfg.ell, cfg.depth, cfg.n_sum, report.alpha,
            format_float(cfg.h),
            format_float(cfg.qmap.c.real), format_float(cfg.qmap.c.imag),
            report.master_seed,
            format_float(reference),
            format_float(report.mu), format_float(report.sigma),
            format_float(report.runtime_seconds),
        ])
    return path


# --------------------------------------------------------------- JSON

def point_json(point: PseudoPoint, p_used: int) -> dict:
    head = point.trajectory[:10]
    return {
        "row": point.lattice_row,
        "beta_sq": point.beta_sq,
        "normalized": point.normalized,
        "p_used": p_used,
        "trajectory_head": [[float(z.real), float(z.imag)] for z in head],
    }


def trial_point_json(trial) -> dict | None:
    """Selected-point document for one ensemble trial (None if it failed)."""
    if trial.error is not None or trial.row is None:
        return None
    return {
        "row": trial.row,
        "beta_sq": trial.beta_sq,
        "normalized": trial.normalized,
        "p_used": trial.p_used,
        "trajectory_head": [
            [z.real, z.imag] for z in trial.trajectory_head
        ],
    }


def sample_report_json(
    report: ExperimentReport,
    reference: float,
    *,
    h_mode: str,
    tol_h: float | None,
    points: list[dict | None],
) -> dict:
    """Assemble the sample report document (no timings: see module docs)."""
    cfg = report.config
    trials = []
    for t, pt in zip(report.per_trial, points):
        trials.append({
            "seed": t.seed,
            "average": t.average,
            "point": pt,
            "error": t.error,
        })
    return {
        "schema": SAMPLE_REPORT_SCHEMA_ID,
        "params": {
            "c": [cfg.qmap.c.real, cfg.qmap.c.imag],
            "m_cover": cfg.m_cover,
            "ell": cfg.ell,
            "N": cfg.depth,
            "n": cfg.n_sum,
            "alpha": report.alpha,
            "h": cfg.h,
            "h_mode": h_mode,
            "seed": report.master_seed,
            "tol_density": cfg.tol_density,
            "tol_h": tol_h,
            "threshold": cfg.threshold,
            "p_max": cfg.p_max,
        },
        "g": cfg.g.name,
        "reference_integral": reference,
        "mu": report.mu,
        "sigma": report.sigma,
        "complete": report.complete,
        "trials": trials,
    }


def write_json(path: str | Path, doc: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path


# ------------------------------------------------------------- pixmap

def render_cover_bitmap(cover: BorelCover, resolution: int = 800) -> np.ndarray:
    """Rasterize the ball covering: True pixels are the circle strokes.

    The viewport is the square hull of all centers padded by 1.5 radii;
    each circle is stroked one pixel wide (ring test |dist - r| <= 0.5 px
    on a local window around the center).
    """
    if resolution < 8:
        raise ValueError(f"resolution must be >= 8, got {resolution}")
    xs, ys = cover.centers.real, cover.centers.imag
    pad = 1.5 * cover.radius
    cx = 0.5 * (xs.min() + xs.max())
    cy = 0.5 * (ys.min() + ys.max())
    half = 0.5 * max(xs.max() - xs.min(), ys.max() - ys.min()) + pad
    scale = resolution / (2.0 * half)

    img = np.zeros((resolution, resolution), dtype=bool)
    r_px = cover.radius * scale
    px = (xs - (cx - half)) * scale
    # Image row 0 is the top of the viewport.
    py = ((cy + half) - ys) * scale
    lo = max(1.0, r_px - 1.0)
    hi = r_px + 1.0
    for x0, y0 in zip(px, py):
        j0 = max(int(np.floor(x0 - hi)), 0)
        j1 = min(int(np.ceil(x0 + hi)) + 1, resolution)
        i0 = max(int(np.floor(y0 - hi)), 0)
        i1 = min(int(np.ceil(y0 + hi)) + 1, resolution)
        if j0 >= j1 or i0 >= i1:
            continue
        jj, ii = np.meshgrid(np.arange(j0, j1), np.arange(i0, i1))
        dist = np.hypot(jj + 0.5 - x0, ii + 0.5 - y0)
        img[i0:i1, j0:j1] |= np.abs(dist - r_px) <= 0.5
    return img


def write_ppm_p1(path: str | Path, bitmap: np.ndarray) -> Path:
    """Plain (ASCII) monochrome pixmap; 1 = black stroke."""
    path = Path(path)
    h, w = bitmap.shape
    lines = [f"P1\n{w} {h}\n"]
    for row in bitmap:
        tokens = np.where(row, "1", "0")
        # Keep lines short per the format's 70-character guidance.
        for k in range(0, w, 32):
            lines.append(" ".join(tokens[k:k + 32]) + "\n")
    path.write_text("".join(lines), encoding="ascii")
    return path


def write_ppm_p6(path: str | Path, bitmap: np.ndarray) -> Path:
    """Binary RGB pixmap; strokes are black on white."""
    path = Path(path)
    h, w = bitmap.shape
    rgb = np.repeat(
        np.where(bitmap[..., None], 0, 255).astype(np.uint8), 3, axis=2
    )
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())
    return path


# ------------------------------------------------------------ figures

def fig_cover(cover: BorelCover, path: str | Path) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 6))
    for z in cover.centers:
        ax.add_patch(plt.Circle((z.real, z.imag), cover.radius,
                                fill=False, lw=0.6, color="tab:blue"))
    ax.plot(cover.centers.real, cover.centers.imag, ".", ms=1.5, color="k")
    ax.set_aspect("equal")
    ax.autoscale_view()
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title(f"{len(cover)} ball centers, radius {cover.radius:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def fig_dimension(est: DimensionEstimate, path: str | Path) -> Path:
    path = Path(path)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    for cand in est.candidates:
        ns = [n for n, _, _ in cand.levels]
        vals = [v for _, v, _ in cand.levels]
        ax1.plot(ns, vals, lw=0.8, alpha=0.7, label=f"h={cand.h:.6g}")
        ax2.plot(ns[1:], [r for _, _, r in cand.levels[1:]], lw=0.8, alpha=0.7)
    ax1.set_xlabel("level n")
    ax1.set_ylabel("f_n")
    if len(est.candidates) <= 8:
        ax1.legend(fontsize=7)
    ax2.axhline(1.0, color="k", lw=0.5)
    ax2.set_xlabel("level n")
    ax2.set_ylabel("f_n / f_{n-1}")
    fig.suptitle(f"dimension estimate h = {est.h:.8g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def fig_density(res: DensityResult, path: str | Path) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ns = [n for n, _, _ in res.levels]
    vals = [v for _, v, _ in res.levels]
    ax.plot(ns, vals, "o-", ms=3)
    ax.axhline(res.value, color="tab:red", lw=0.6)
    ax.set_xlabel("level n")
    ax.set_ylabel("f_n(z)")
    state = "converged" if res.converged else "not converged"
    ax.set_title(f"f({res.z:.6g}) = {res.value:.8g} ({state})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def fig_sample(
    report: ExperimentReport, reference: float, path: str | Path
) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4))
    idx = np.arange(len(report.per_trial))
    avgs = np.array([t.average for t in report.per_trial])
    ax.plot(idx, avgs, "o", ms=4, label="trial average")
    ax.axhline(report.mu, color="tab:red", lw=1, label="ensemble mean")
    ax.axhline(report.mu + report.sigma, color="tab:red", lw=0.5, ls="--")
    ax.axhline(report.mu - report.sigma, color="tab:red", lw=0.5, ls="--")
    ax.axhline(reference, color="tab:green", lw=1, ls=":",
               label="cover reference")
    ax.set_xlabel("trial")
    ax.set_ylabel(f"average of {report.config.g.name}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
