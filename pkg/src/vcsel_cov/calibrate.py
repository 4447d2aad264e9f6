"""Noise calibration: choose n0 (and optionally the beam width scale) so
that simulated coverage matches a reference table in least squares."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, VcselCovError
from .radio_map import coverage_vs_n0, scene_powers
from .scene import SceneConfig

# exhaustive-search rows of the reference results: (height_m, theta_deg, coverage_pct)
REFERENCE_ES_ROWS = (
    (0.5, 10.0, 93.33),
    (1.0, 10.0, 88.81),
    (1.5, 8.0, 89.70),
    (2.0, 11.0, 53.80),
)
MAX_RMS_PP = 15.0


def default_n0_grid(lo: float = 1e-12, hi: float = 1e-4, per_decade: int = 9) -> np.ndarray:
    decades = math.log10(hi) - math.log10(lo)
    return np.logspace(math.log10(lo), math.log10(hi), int(round(decades * per_decade)) + 1)


def default_width_grid() -> np.ndarray:
    return np.round(np.arange(0.15, 0.35 + 1e-9, 0.0125), 6)


class CalibrationError(VcselCovError):
    """No candidate reproduces the reference table closely enough."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass
class CalibrationResult:
    n0: float
    beam_width_scale: float
    rms_pp: float
    # (beam_width_scale, n0, rms_pp) for every candidate tried
    sweep: list[tuple[float, float, float]] = field(default_factory=list)
    fitted: list[float] = field(default_factory=list)

    def to_json(self, path: str | Path, targets) -> None:
        doc = {
            "n0": self.n0,
            "beam_width_scale": self.beam_width_scale,
            "rms_pp": self.rms_pp,
            "targets": [list(t) for t in targets],
            "fitted_coverage_pct": self.fitted,
        }
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_calibration(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read calibration file {path}: {exc}") from exc
    if "n0" not in doc:
        raise ConfigError(f"calibration file {path} has no n0")
    return doc


def apply_calibration(cfg: SceneConfig, doc: dict) -> SceneConfig:
    changes = {"n0": float(doc["n0"])}
    if "beam_width_scale" in doc:
        changes["beam_width_scale"] = float(doc["beam_width_scale"])
    return cfg.with_(**changes)


def calibrate_n0(
    cfg: SceneConfig,
    targets=REFERENCE_ES_ROWS,
    n0_grid=None,
    width_grid=None,
    max_rms: float = MAX_RMS_PP,
) -> CalibrationResult:
    """Least-squares fit of n0 over a log grid.

    ``width_grid`` additionally sweeps ``beam_width_scale``; by default the
    config's value is held fixed. Ties go to the first candidate in sweep
    order (smaller width, then smaller n0).
    """
    targets = [tuple(float(v) for v in t) for t in targets]
    if not targets:
        raise ConfigError("calibration target table is empty")
    n0_grid = default_n0_grid() if n0_grid is None else np.asarray(n0_grid, dtype=float)
    widths = [cfg.beam_width_scale] if width_grid is None else list(width_grid)
    want = np.array([t[2] for t in targets])

    sweep = []
    best = None
    for width in widths:
        trial = cfg.with_(beam_width_scale=float(width))
        cov = np.array([
            coverage_vs_n0(
                scene_powers(trial, h, math.radians(theta_deg))[0],
                n0_grid, trial.gamma_th_db, trial.sinr_domain,
            )
            for h, theta_deg, _ in targets
        ])  # targets x n0
        rms = np.sqrt(np.mean((cov - want[:, None]) ** 2, axis=0))
        for i, n0 in enumerate(n0_grid):
            sweep.append((float(width), float(n0), float(rms[i])))
        i = int(np.argmin(rms))
        if best is None or rms[i] < best[2]:
            best = (float(width), float(n0_grid[i]), float(rms[i]), cov[:, i].tolist())

    result = CalibrationResult(n0=best[1], beam_width_scale=best[0], rms_pp=best[2],
                               sweep=sweep, fitted=best[3])
    if result.rms_pp >= max_rms:
        raise CalibrationError(
            f"best RMS error {result.rms_pp:.2f} pp >= {max_rms} pp; model mismatch",
            result,
        )
    return result
