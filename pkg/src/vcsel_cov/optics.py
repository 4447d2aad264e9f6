"""Beam/receiver optics: angular deviation, far-field Gaussian irradiance
and the horizontal photodetector front end.

Scalar functions define the contracts; the ``*_array`` twins are the
vectorised forms used by :mod:`vcsel_cov.radio_map`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError


@dataclass(frozen=True)
class FrontEnd:
    a_d: float
    fov: float
    g_conc: float

    def __post_init__(self):
        if self.a_d <= 0:
            raise ValueError("a_d must be positive")
        if not 0 < self.fov < math.pi / 2:
            raise ValueError("fov must lie in (0, pi/2)")
        if self.g_conc < 1:
            raise ValueError("g_conc must be >= 1")

    @classmethod
    def from_config(cls, cfg) -> "FrontEnd":
        return cls(a_d=cfg.a_d, fov=cfg.fov, g_conc=concentrator_gain(cfg.n_conc, cfg.fov))


def angular_deviation(beam_dir, grid_vec) -> float:
    """Angle between a beam axis and the ray towards a grid point, in [0, pi]."""
    v = np.asarray(grid_vec, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise GeometryError("zero-length grid vector")
    # atan2 form stays accurate near 0 and pi, where acos loses digits
    b = np.asarray(beam_dir, dtype=float)
    return math.atan2(float(np.linalg.norm(np.cross(b, v))), float(np.dot(b, v)))


def irradiance(p_t: float, theta_div: float, d: float, theta_diff: float) -> float:
    """Far-field Gaussian irradiance (W/m^2) with beam radius w = d * theta_div."""
    if d <= 0 or theta_div <= 0:
        raise GeometryError("irradiance needs d > 0 and theta_div > 0")
    w = theta_div * d
    return 2.0 * p_t / (math.pi * w * w) * math.exp(-2.0 * (theta_diff / theta_div) ** 2)


def concentrator_gain(n_conc: float, fov: float) -> float:
    """Ideal non-imaging concentrator gain n^2 / sin^2(fov)."""
    if fov <= 0:
        raise ValueError("fov must be positive")
    return n_conc**2 / math.sin(fov) ** 2


def received_power(irr: float, front: FrontEnd, incidence: float) -> float:
    # gate is inclusive at incidence == fov
    if incidence > front.fov:
        return 0.0
    return irr * front.a_d * math.cos(incidence) * front.g_conc


def incidence_angle(z_source: float, z_rx: float, d: float) -> float:
    """Incidence on a horizontal, upward-facing detector."""
    return math.acos(min(1.0, max(-1.0, (z_source - z_rx) / d)))


def angular_deviation_array(directions: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Pairwise deviations for ``vecs`` of shape (G, K, 3) against K unit directions."""
    dot = np.einsum("gkc,kc->gk", vecs, directions)
    cross = np.cross(vecs, directions[None, :, :])
    return np.arctan2(np.sqrt(np.einsum("gkc,gkc->gk", cross, cross)), dot)


def irradiance_array(p_t: float, theta_div: float, dists: np.ndarray, theta_diff: np.ndarray) -> np.ndarray:
    if theta_div <= 0 or np.any(dists <= 0):
        raise GeometryError("irradiance needs d > 0 and theta_div > 0")
    w = theta_div * dists
    return 2.0 * p_t / (np.pi * w * w) * np.exp(-2.0 * (theta_diff / theta_div) ** 2)


def received_power_array(irr: np.ndarray, front: FrontEnd, incidence: np.ndarray) -> np.ndarray:
    gain = front.a_d * np.cos(incidence) * front.g_conc
    return np.where(incidence <= front.fov, irr * gain, 0.0)
