"""Received-power matrices, SINR maps and the coverage objective."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GeometryError
from .optics import (
    FrontEnd,
    angular_deviation_array,
    irradiance_array,
    received_power_array,
)
from .scene import BeamSet, ReceiverGrid, SceneConfig, build_beams, build_grid

CSV_HEADER = ["x", "y", "sinr_db", "serving", "covered"]


@dataclass
class SinrMap:
    xs: np.ndarray
    ys: np.ndarray
    sinr: np.ndarray  # (nx, ny), linear
    serving: np.ndarray  # (nx, ny), -1 where no beam reaches
    covered: np.ndarray  # (nx, ny) bool

    @property
    def coverage_pct(self) -> float:
        return 100.0 * int(self.covered.sum()) / self.covered.size

    @property
    def hole_pct(self) -> float:
        return 100.0 - self.coverage_pct

    @property
    def sinr_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.sinr)


def power_matrix(
    beams: BeamSet,
    grid: ReceiverGrid,
    front: FrontEnd,
    p_t: float,
    theta_div: float,
) -> np.ndarray:
    """Received power (W) for every grid point (rows, grid.points() order)
    and every emitter (columns). ``theta_div`` is the Gaussian width angle.
    """
    pts = grid.points()
    src = beams.sources
    if np.any(src[:, 2] <= grid.z):
        raise GeometryError("receiver plane must lie below every source")
    vecs = pts[:, None, :] - src[None, :, :]
    dists = np.sqrt(np.einsum("gkc,gkc->gk", vecs, vecs))
    if np.any(dists == 0):
        raise GeometryError("grid point coincides with a source")
    theta_diff = angular_deviation_array(beams.directions, vecs)
    irr = irradiance_array(p_t, theta_div, dists, theta_diff)
    incidence = np.arccos(np.clip((src[None, :, 2] - grid.z) / dists, -1.0, 1.0))
    return received_power_array(irr, front, incidence)


def _sinr_rows(powers: np.ndarray, n0: float, domain: str) -> tuple[np.ndarray, np.ndarray]:
    k_star = np.argmax(powers, axis=1)  # first maximum: lowest index wins ties
    if domain == "electrical":
        # photocurrent-domain ratio; n0 is the noise-equivalent optical power
        powers = powers * powers
        n0 = n0 * n0
    elif domain != "optical":
        raise ValueError(f"unknown SINR domain {domain!r}")
    rows = np.arange(len(powers))
    signal = powers[rows, k_star]
    # sum the other beams directly; total - signal cancels badly at high SINR
    others = powers.copy()
    others[rows, k_star] = 0.0
    interference = others.sum(axis=1)
    denom = interference + n0
    with np.errstate(divide="ignore", invalid="ignore"):
        sinr = np.where(signal > 0, signal / denom, 0.0)
    k_star = np.where(signal > 0, k_star, -1)
    return sinr, k_star


def sinr_map(
    powers: np.ndarray,
    n0: float,
    gamma_th_db: float,
    grid: ReceiverGrid | None = None,
    domain: str = "optical",
) -> SinrMap:
    """Dominant-beam SINR per grid point.

    Without ``grid`` the result is laid out as a single column (N_grid, 1).
    """
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    sinr, k_star = _sinr_rows(np.asarray(powers, dtype=float), n0, domain)
    covered = sinr >= 10.0 ** (gamma_th_db / 10.0)
    if grid is None:
        shape = (len(sinr), 1)
        xs = np.arange(len(sinr), dtype=float)
        ys = np.zeros(1)
        return SinrMap(xs, ys, sinr.reshape(shape), k_star.reshape(shape), covered.reshape(shape))

    nx, ny = len(grid.xs), len(grid.ys)

    def to_xy(a):
        return a.reshape(ny, nx).T

    return SinrMap(grid.xs, grid.ys, to_xy(sinr), to_xy(k_star), to_xy(covered))


def scene_powers(cfg: SceneConfig, h_r: float, theta: float) -> tuple[np.ndarray, ReceiverGrid]:
    """Power matrix for divergence action ``theta`` at receiver height ``h_r``."""
    grid = build_grid(cfg, h_r)
    beams = build_beams(cfg, h_r)
    front = FrontEnd.from_config(cfg)
    return power_matrix(beams, grid, front, cfg.p_t, cfg.beam_width_scale * theta), grid


def coverage(cfg: SceneConfig, h_r: float, theta: float) -> tuple[float, SinrMap]:
    """Coverage percentage C(theta | h_r) and the underlying SINR map."""
    if not 0 < h_r < cfg.room_h:
        raise GeometryError(f"receiver height {h_r} outside (0, {cfg.room_h})")
    if not 0 < theta < math.pi / 2:
        raise GeometryError("divergence must lie in (0, pi/2)")
    powers, grid = scene_powers(cfg, h_r, theta)
    smap = sinr_map(powers, cfg.n0, cfg.gamma_th_db, grid, domain=cfg.sinr_domain)
    return smap.coverage_pct, smap


def coverage_vs_n0(powers: np.ndarray, n0_values, gamma_th_db: float, domain: str) -> np.ndarray:
    """Coverage for each candidate n0, reusing one power matrix."""
    powers = np.asarray(powers, dtype=float)
    thr = 10.0 ** (gamma_th_db / 10.0)
    out = []
    for n0 in n0_values:
        sinr, _ = _sinr_rows(powers, n0, domain)
        out.append(100.0 * int((sinr >= thr).sum()) / len(sinr))
    return np.array(out)


def write_sinr_csv(smap: SinrMap, path: str | Path) -> None:
    sinr_db = smap.sinr_db
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for j, y in enumerate(smap.ys):
            for i, x in enumerate(smap.xs):
                w.writerow(
                    [
                        f"{x:.6g}",
                        f"{y:.6g}",
                        f"{sinr_db[i, j]:.6g}",
                        int(smap.serving[i, j]),
                        int(bool(smap.covered[i, j])),
                    ]
                )


def read_sinr_csv(path: str | Path) -> SinrMap:
    """Inverse of :func:`write_sinr_csv` (SINR recovered from the dB column)."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    xs = np.array(sorted({float(r["x"]) for r in rows}))
    ys = np.array(sorted({float(r["y"]) for r in rows}))
    nx, ny = len(xs), len(ys)
    sinr = np.empty((nx, ny))
    serving = np.empty((nx, ny), dtype=int)
    covered = np.empty((nx, ny), dtype=bool)
    for n, r in enumerate(rows):
        j, i = divmod(n, nx)
        sinr[i, j] = 10.0 ** (float(r["sinr_db"]) / 10.0)
        serving[i, j] = int(r["serving"])
        covered[i, j] = r["covered"] == "1"
    return SinrMap(xs, ys, sinr, serving, covered)
