"""Physical configuration: array geometry, obstacles, simulation grid, beam weights.

Lengths are in meters, field amplitudes and power are dimensionless.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
import json
import math
from pathlib import Path

import numpy as np

from .errors import GeometryError, GridError, ObstacleError, PowerError, RangeError

SPEED_OF_LIGHT = 299_792_458.0
POWER_RTOL = 1e-9

__all__ = [
    "SPEED_OF_LIGHT",
    "ArrayGeometry",
    "Obstacle",
    "GridConfig",
    "Scenario",
    "Weights",
    "validate_scenario",
    "blockage_mask",
    "load_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
]


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array along y, centred on the origin at x = 0."""

    num_elements: int
    spacing: float

    def __post_init__(self):
        if int(self.num_elements) != self.num_elements or self.num_elements < 2:
            raise GeometryError(f"need at least 2 elements, got {self.num_elements}")
        if not self.spacing > 0:
            raise GeometryError(f"element spacing must be positive, got {self.spacing}")

    @property
    def y_positions(self) -> np.ndarray:
        n = np.arange(self.num_elements)
        return (n - (self.num_elements - 1) / 2) * self.spacing

    @property
    def aperture(self) -> float:
        return (self.num_elements - 1) * self.spacing


@dataclass(frozen=True)
class Obstacle:
    """Closed rectangle [x_left, x_right] x [y_down, y_up] that nulls the field."""

    x_left: float
    x_right: float
    y_down: float
    y_up: float

    def __post_init__(self):
        if not self.x_left < self.x_right or not self.y_down < self.y_up:
            raise ObstacleError(f"degenerate obstacle {self}")
        if not self.x_left > 0:
            raise ObstacleError(f"obstacle must lie strictly in front of the aperture (x_left={self.x_left})")

    def contains(self, x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        return (x >= self.x_left) & (x <= self.x_right) & (y >= self.y_down) & (y <= self.y_up)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_left, self.x_right, self.y_down, self.y_up)


@dataclass(frozen=True)
class GridConfig:
    """Propagation grid.

    ``dx`` and ``dy`` may be left as None and are then filled in by
    :func:`validate_scenario` (one wavelength and a quarter wavelength).
    ``absorption`` is the peak per-step log-attenuation of the sponge layer
    that occupies the FFT padding outside ``|y| <= y_halfspan``; 0 turns it
    off and gives a purely periodic (unitary) propagator.
    """

    y_halfspan: float
    x_max: float
    dx: float | None = None
    dy: float | None = None
    pad_factor: float = 2.0
    absorption: float = 0.5

    @property
    def window_samples(self) -> int:
        """Sample count of the padded FFT window."""
        from scipy.fft import next_fast_len

        base = 2 * int(math.ceil(self.y_halfspan * self.pad_factor / self.dy))
        return next_fast_len(base)

    @property
    def y(self) -> np.ndarray:
        m = self.window_samples
        return (np.arange(m) - m // 2) * self.dy

    @property
    def num_steps(self) -> int:
        return int(math.ceil(self.x_max / self.dx - 1e-9))

    @property
    def x_planes(self) -> np.ndarray:
        return np.arange(self.num_steps + 1) * self.dx


@dataclass(frozen=True)
class Scenario:
    frequency: float
    power: float
    geometry: ArrayGeometry
    grid: GridConfig
    obstacles: tuple[Obstacle, ...] = ()
    noise_power: float = 1.0

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    @property
    def wavenumber(self) -> float:
        return 2 * math.pi / self.wavelength

    def inside_obstacle(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        hit = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        for ob in self.obstacles:
            hit |= ob.contains(x, y)
        return hit

    def with_obstacles(self, obstacles) -> "Scenario":
        return validate_scenario(replace(self, obstacles=tuple(obstacles)))


class Weights:
    """Aperture excitation with a transmit-power constraint ``||w||^2 = P``.

    The constructor rejects vectors off the constraint by more than 1e-9
    relative; use :meth:`normalized` to rescale arbitrary vectors.
    """

    __slots__ = ("w", "power")

    def __init__(self, w, power: float):
        w = np.array(w, dtype=complex).ravel()
        if not power > 0:
            raise PowerError(f"power must be positive, got {power}")
        energy = float(np.vdot(w, w).real)
        if abs(energy - power) > POWER_RTOL * power:
            raise PowerError(f"||w||^2 = {energy!r} differs from P = {power!r}")
        w.setflags(write=False)
        self.w = w
        self.power = float(power)

    @classmethod
    def normalized(cls, w, power: float) -> "Weights":
        w = np.asarray(w, dtype=complex).ravel()
        norm = np.linalg.norm(w)
        if norm == 0 or not np.isfinite(norm):
            raise PowerError("cannot normalize a zero or non-finite vector")
        return cls(w * (math.sqrt(power) / norm), power)

    def __len__(self):
        return self.w.size

    def __repr__(self):
        return f"Weights(N={self.w.size}, P={self.power:g})"

    def to_csv(self, path) -> None:
        lines = ["index,re,im"]
        lines += [f"{i},{float(v.real)!r},{float(v.imag)!r}" for i, v in enumerate(self.w)]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path, power: float | None = None) -> "Weights":
        rows = Path(path).read_text().strip().splitlines()[1:]
        vals = np.zeros(len(rows), dtype=complex)
        for row in rows:
            i, re, im = row.split(",")
            vals[int(i)] = complex(float(re), float(im))
        if power is None:
            power = float(np.vdot(vals, vals).real)
        return cls(vals, power)


def validate_scenario(raw: Scenario) -> Scenario:
    """Fill derived grid defaults and check the scenario is simulable."""
    if not raw.frequency > 0:
        raise GeometryError(f"frequency must be positive, got {raw.frequency}")
    if not raw.power > 0:
        raise PowerError(f"power must be positive, got {raw.power}")
    if not raw.noise_power > 0:
        raise PowerError(f"noise power must be positive, got {raw.noise_power}")
    geom = raw.geometry
    if not isinstance(geom, ArrayGeometry):
        geom = ArrayGeometry(*geom)

    lam = SPEED_OF_LIGHT / raw.frequency
    g = raw.grid
    dx = lam if g.dx is None else g.dx
    dy = lam / 4 if g.dy is None else g.dy
    if not dx > 0:
        raise GridError(f"plane step dx must be positive, got {dx}")
    if not dy > 0 or dy > lam / 2 * (1 + 1e-12):
        raise GridError(f"dy={dy} violates 0 < dy <= lambda/2 = {lam / 2}")
    if g.pad_factor < 1:
        raise GridError("pad_factor must be >= 1")
    if g.absorption < 0:
        raise GridError("absorption must be non-negative")
    if not g.x_max > 0:
        raise GridError("x_max must be positive")
    if g.y_halfspan < geom.aperture / 2:
        raise GridError(f"y_halfspan={g.y_halfspan} does not cover the aperture ({geom.aperture} m)")
    grid = replace(g, dx=float(dx), dy=float(dy))

    obstacles = tuple(ob if isinstance(ob, Obstacle) else Obstacle(*ob) for ob in raw.obstacles)
    for ob in obstacles:
        if ob.x_right > grid.x_max or max(abs(ob.y_down), abs(ob.y_up)) > grid.y_halfspan:
            raise ObstacleError(f"{ob} lies outside the simulation window")

    scen = Scenario(
        frequency=float(raw.frequency),
        power=float(raw.power),
        geometry=geom,
        grid=grid,
        obstacles=obstacles,
        noise_power=float(raw.noise_power),
    )
    # elements must land on distinct grid cells
    cells = np.rint(geom.y_positions / dy)
    if np.unique(cells).size != cells.size:
        raise GridError(f"dy={dy} is too coarse for element spacing {geom.spacing}")
    return scen


def blockage_mask(scenario: Scenario, x: float) -> np.ndarray:
    """0/1 mask over the padded y grid at plane ``x`` (0 inside any obstacle).

    An obstacle edge lying on the scene boundary ``|y| = y_halfspan`` is
    continued through the FFT padding, so a wall that spans the scene cannot
    be bypassed through the absorbing layer.
    """
    g = scenario.grid
    if x < 0 or x > g.x_max + 1e-12:
        raise RangeError(f"x={x} outside [0, {g.x_max}]")
    y = g.y
    blocked = np.zeros(y.shape, dtype=bool)
    edge = g.y_halfspan * (1 - 1e-12)
    for ob in scenario.obstacles:
        if not ob.x_left <= x <= ob.x_right:
            continue
        lo = -np.inf if ob.y_down <= -edge else ob.y_down
        hi = np.inf if ob.y_up >= edge else ob.y_up
        blocked |= (y >= lo) & (y <= hi)
    return np.where(blocked, 0.0, 1.0)


def scenario_from_dict(cfg: dict) -> Scenario:
    """Build a validated scenario from the JSON configuration layout."""
    freq = float(cfg["frequency_hz"])
    lam = SPEED_OF_LIGHT / freq
    geom = ArrayGeometry(int(cfg["num_elements"]), float(cfg.get("spacing_over_lambda", 0.5)) * lam)
    grid_cfg = dict(cfg.get("grid", {}))
    grid = GridConfig(
        y_halfspan=float(grid_cfg["y_halfspan"]),
        x_max=float(grid_cfg["x_max"]),
        dx=grid_cfg.get("dx"),
        dy=grid_cfg.get("dy"),
        pad_factor=float(grid_cfg.get("pad_factor", 2.0)),
        absorption=float(grid_cfg.get("absorption", 0.5)),
    )
    obstacles = tuple(Obstacle(*map(float, ob)) for ob in cfg.get("obstacles", []))
    raw = Scenario(
        frequency=freq,
        power=float(cfg.get("power", 1.0)),
        geometry=geom,
        grid=grid,
        obstacles=obstacles,
        noise_power=float(cfg.get("noise_power", 1.0)),
    )
    return validate_scenario(raw)


def scenario_to_dict(scenario: Scenario) -> dict:
    g = scenario.grid
    return {
        "frequency_hz": scenario.frequency,
        "num_elements": scenario.geometry.num_elements,
        "spacing_over_lambda": scenario.geometry.spacing / scenario.wavelength,
        "power": scenario.power,
        "noise_power": scenario.noise_power,
        "obstacles": [list(ob.as_tuple()) for ob in scenario.obstacles],
        "grid": {
            "dx": g.dx,
            "dy": g.dy,
            "y_halfspan": g.y_halfspan,
            "x_max": g.x_max,
            "pad_factor": g.pad_factor,
            "absorption": g.absorption,
        },
    }


def load_scenario(path) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))
