"""Room geometry, the steered VCSEL array, the receiver grid and the
state/action spaces, plus config-file loading.

Angles are stored in radians everywhere in code; the config file carries
degrees and is converted once in :func:`load_config`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, GeometryError

TILE_TOL = 1e-9


def _deg_list(values):
    return tuple(math.radians(v) for v in values)


@dataclass(frozen=True)
class SceneConfig:
    """Simulation parameters. Defaults follow the desk-scale reference setup."""

    room_l: float = 8.0
    room_w: float = 8.0
    room_h: float = 3.0
    grid_step: float = 0.2
    n_tx_side: int = 15
    p_t: float = 0.010
    a_d: float = 1e-4
    fov: float = math.radians(75.0)
    n_conc: float = 1.5
    gamma_th_db: float = 5.0
    # optical noise-equivalent power, W (set by calibrate-n0)
    n0: float = 5.994842503189421e-12
    emitter_pitch: float = 0.0
    # None aims the beam lattice at whichever receiver plane is evaluated
    target_plane_z: float | None = None
    # 1/e^2 beam half-width angle = beam_width_scale * divergence action
    beam_width_scale: float = 0.225
    sinr_domain: str = "electrical"
    heights: tuple[float, ...] = (0.5, 1.0, 1.5, 2.0)
    divergences: tuple[float, ...] = field(
        default_factory=lambda: _deg_list(range(5, 21))
    )
    traversal: str = "ascending"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("room_l", "room_w", "room_h", "grid_step", "a_d"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.p_t < 0:
            raise ConfigError(f"p_t must be non-negative, got {self.p_t}")
        if not 0 < self.fov < math.pi / 2:
            raise ConfigError("fov must lie in (0, 90) degrees")
        if self.n_conc < 1:
            raise ConfigError("n_conc must be >= 1")
        if int(self.n_tx_side) != self.n_tx_side or self.n_tx_side < 1:
            raise GeometryError("n_tx_side must be a positive integer")
        if self.n0 < 0:
            raise ConfigError("n0 must be non-negative")
        if self.emitter_pitch < 0:
            raise ConfigError("emitter_pitch must be non-negative")
        if self.beam_width_scale <= 0:
            raise ConfigError("beam_width_scale must be positive")
        if self.sinr_domain not in ("optical", "electrical"):
            raise ConfigError(f"unknown sinr_domain {self.sinr_domain!r}")
        if self.traversal not in ("ascending", "random"):
            raise ConfigError(f"unknown traversal {self.traversal!r}")
        for span in (self.room_l, self.room_w):
            ratio = span / self.grid_step
            if abs(ratio - round(ratio)) > TILE_TOL * max(1.0, ratio):
                raise GeometryError(
                    f"grid_step {self.grid_step} does not tile a {span} m span"
                )
        extent = (self.n_tx_side - 1) * self.emitter_pitch
        if extent > min(self.room_l, self.room_w):
            raise GeometryError("emitter array is wider than the room")
        if self.target_plane_z is not None and not 0 <= self.target_plane_z < self.room_h:
            raise GeometryError("target_plane_z must lie in [0, room_h)")
        _check_increasing(self.heights, "heights")
        _check_increasing(self.divergences, "divergences")
        if any(h < 0 or h >= self.room_h for h in self.heights):
            raise GeometryError("every height must lie in [0, room_h)")
        if any(not 0 < t < math.pi / 2 for t in self.divergences):
            raise ConfigError("every divergence must lie in (0, 90) degrees")

    @property
    def n_tx(self) -> int:
        return self.n_tx_side**2

    @property
    def gamma_th(self) -> float:
        """Linear SINR threshold."""
        return 10.0 ** (self.gamma_th_db / 10.0)

    def with_(self, **changes) -> "SceneConfig":
        return replace(self, **changes)

    def to_file_dict(self) -> dict:
        """Flat mapping in file units (degrees for angles)."""
        d = asdict(self)
        d["fov"] = math.degrees(self.fov)
        d["heights"] = list(self.heights)
        d["divergences"] = [round(math.degrees(t), 12) for t in self.divergences]
        return d


def _check_increasing(values, name):
    if len(values) == 0:
        raise ConfigError(f"{name} must be non-empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{name} must be strictly increasing")


_ANGLE_KEYS = {"fov"}
_FIELDS = set(SceneConfig.__dataclass_fields__)


def config_from_dict(raw: dict) -> SceneConfig:
    """Build a config from a flat file-unit mapping; missing keys keep defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a key-value mapping")
    unknown = set(raw) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kw = {}
    try:
        for key, value in raw.items():
            if key in _ANGLE_KEYS:
                kw[key] = math.radians(float(value))
            elif key == "divergences":
                kw[key] = _deg_list(float(v) for v in value)
            elif key == "heights":
                kw[key] = tuple(float(v) for v in value)
            elif key == "n_tx_side":
                kw[key] = int(value)
            elif key in ("sinr_domain", "traversal"):
                kw[key] = str(value)
            elif key == "target_plane_z":
                kw[key] = None if value in (None, "receiver") else float(value)
            else:
                kw[key] = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc
    return SceneConfig(**kw)


def load_config(path: str | Path | None) -> SceneConfig:
    if path is None:
        return SceneConfig()
    try:
        text = Path(path).read_text()
        raw = yaml.safe_load(text)
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(raw or {})


@dataclass(frozen=True)
class BeamSet:
    sources: np.ndarray  # (N_TX, 3)
    directions: np.ndarray  # (N_TX, 3) unit vectors, z < 0

    def __len__(self):
        return len(self.sources)


@dataclass(frozen=True)
class ReceiverGrid:
    xs: np.ndarray
    ys: np.ndarray
    z: float

    @property
    def n_points(self) -> int:
        return len(self.xs) * len(self.ys)

    def points(self) -> np.ndarray:
        """Grid points as (N_grid, 3), row-major in y then x."""
        X, Y = np.meshgrid(self.xs, self.ys)
        return np.column_stack([X.ravel(), Y.ravel(), np.full(X.size, self.z)])


def build_beams(cfg: SceneConfig, h_r: float | None = None) -> BeamSet:
    """Place the emitters at the ceiling centre and steer emitter (r, c)
    at the centre of lattice cell (r, c).

    The lattice sits at ``cfg.target_plane_z``, or at ``h_r`` when the
    config aims at the receiver plane.
    """
    n = cfg.n_tx_side
    if n < 1:
        raise GeometryError("n_tx_side must be >= 1")
    if cfg.target_plane_z is not None:
        tz = cfg.target_plane_z
    elif h_r is not None:
        tz = h_r
    else:
        raise GeometryError("receiver-plane aiming needs a receiver height")
    if tz >= cfg.room_h:
        raise GeometryError("aim plane must be below the ceiling")

    idx = np.arange(n)
    offset = (idx - (n - 1) / 2.0) * cfg.emitter_pitch
    # k = r * n + c; r runs along y, c along x
    R, C = np.meshgrid(idx, idx, indexing="ij")
    src = np.column_stack(
        [
            cfg.room_l / 2 + offset[C.ravel()],
            cfg.room_w / 2 + offset[R.ravel()],
            np.full(n * n, cfg.room_h),
        ]
    )
    tgt = np.column_stack(
        [
            (C.ravel() + 0.5) * cfg.room_l / n,
            (R.ravel() + 0.5) * cfg.room_w / n,
            np.full(n * n, tz),
        ]
    )
    d = tgt - src
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return BeamSet(sources=src, directions=d)


def build_grid(cfg: SceneConfig, h_r: float) -> ReceiverGrid:
    if not 0 <= h_r < cfg.room_h:
        raise GeometryError(f"receiver height {h_r} outside [0, {cfg.room_h})")
    nx = int(round(cfg.room_l / cfg.grid_step))
    ny = int(round(cfg.room_w / cfg.grid_step))
    # linspace pins both endpoints exactly
    xs = np.linspace(0.0, cfg.room_l, nx + 1)
    ys = np.linspace(0.0, cfg.room_w, ny + 1)
    return ReceiverGrid(xs=xs, ys=ys, z=float(h_r))


def grid_vector(source, grid_point) -> tuple[np.ndarray, float]:
    """Vector from an emitter to a grid point and its length."""
    v = np.asarray(grid_point, dtype=float) - np.asarray(source, dtype=float)
    dist = float(np.linalg.norm(v))
    if dist == 0.0:
        raise GeometryError("grid point coincides with the source")
    return v, dist
