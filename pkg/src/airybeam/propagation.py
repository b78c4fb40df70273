"""Scalar 2-D field propagation through obstacle-laden scenes.

The production path is the angular spectrum method (ASM): every plane step
multiplies the y-spectrum by ``exp(-j dx sqrt(k^2 - ky^2))`` and then nulls
samples that fall inside an obstacle.  ``rs_reference`` is a slow direct
Rayleigh-Sommerfeld quadrature used to cross-check the stepper.

Sign convention: a point source radiates ``exp(-j k r)``, so the received
field for excitation ``w`` is ``h^H w`` with ``h_n`` the conjugate of the
field produced by a unit excitation of element ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import math
from typing import Iterable, Sequence

import numpy as np
import scipy.fft as sfft
from scipy.special import hankel2

from .errors import GridError, QuadratureError, RangeError, UserInsideObstacleError
from .scenario import Scenario, Weights, blockage_mask

__all__ = [
    "FieldPlane",
    "FieldGrid",
    "ChannelVector",
    "aperture_plane",
    "asm_step",
    "rs_reference",
    "propagate",
    "field_at",
    "equivalent_channel",
    "channel_matrix",
    "transfer_function",
]


@dataclass
class FieldPlane:
    x: float
    samples: np.ndarray
    dy: float

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.dy)


@dataclass
class FieldGrid:
    """Recorded planes of one propagation run (rows of ``samples`` follow ``x``)."""

    x: np.ndarray
    samples: np.ndarray
    scenario: Scenario = field(repr=False)

    @property
    def y(self) -> np.ndarray:
        return self.scenario.grid.y

    @property
    def planes(self) -> list[FieldPlane]:
        dy = self.scenario.grid.dy
        return [FieldPlane(float(x), row, dy) for x, row in zip(self.x, self.samples)]

    def window(self) -> tuple[np.ndarray, np.ndarray]:
        """Row indices are x planes; returns (y, samples) cropped to the scene window."""
        y = self.y
        keep = np.abs(y) <= self.scenario.grid.y_halfspan + 1e-12
        return y[keep], self.samples[:, keep]

    def to_csv(self, path) -> None:
        """Write ``x,y,re,im,abs`` rows (scene window only), x-major."""
        y, s = self.window()
        xx = np.repeat(self.x, y.size)
        yy = np.tile(y, self.x.size)
        flat = s.ravel()
        data = np.column_stack([xx, yy, flat.real, flat.imag, np.abs(flat)])
        np.savetxt(path, data, delimiter=",", header="x_m,y_m,re,im,abs", comments="", fmt="%.10g")

    def to_heatmap(self, path, scale: str = "dB", floor_db: float = -60.0) -> None:
        """Grayscale image of |E|: rows are y ascending, columns x ascending."""
        from .harness import export_heatmap

        _, s = self.window()
        export_heatmap(np.abs(s.T), path, scale=scale, floor_db=floor_db, amplitude=True, value_label="abs_field_rel")


@dataclass
class ChannelVector:
    h: np.ndarray
    user_point: tuple[float, float]

    def __len__(self):
        return self.h.size


def transfer_function(scenario: Scenario) -> np.ndarray:
    """ASM transfer function for one plane step, in FFT layout.

    Evanescent components (|ky| > k) decay as ``exp(-dx sqrt(ky^2 - k^2))``.
    """
    return _transfer(scenario.frequency, scenario.grid.dx, scenario.grid.dy, scenario.grid.window_samples)


@lru_cache(maxsize=16)
def _transfer(freq: float, dx: float, dy: float, m: int) -> np.ndarray:
    k = 2 * math.pi * freq / 299_792_458.0
    ky = 2 * math.pi * sfft.fftfreq(m, dy)
    diff = k * k - ky * ky
    prop = diff >= 0
    h = np.empty(m, dtype=complex)
    h[prop] = np.exp(-1j * dx * np.sqrt(diff[prop]))
    h[~prop] = np.exp(-dx * np.sqrt(-diff[~prop]))
    h.setflags(write=False)
    return h


def _sponge(scenario: Scenario) -> np.ndarray | None:
    g = scenario.grid
    if g.absorption == 0:
        return None
    y = np.abs(g.y)
    edge = np.abs(g.y).max()
    if edge <= g.y_halfspan:
        return None
    depth = np.clip((y - g.y_halfspan) / (edge - g.y_halfspan), 0.0, 1.0)
    return np.exp(-g.absorption * np.sin(0.5 * math.pi * depth) ** 2)


class _Stepper:
    """Per-scenario cache of the transfer function, sponge and obstacle masks."""

    def __init__(self, scenario: Scenario, workers: int | None = None):
        self.scenario = scenario
        self.h = transfer_function(scenario)
        self.sponge = _sponge(scenario)
        self.workers = workers
        self._masks: dict[int, np.ndarray | None] = {}

    def multiplier(self, x: float) -> np.ndarray | None:
        key = round(x / self.scenario.grid.dx * 1e6)
        if key not in self._masks:
            mult = None
            if any(ob.x_left <= x <= ob.x_right for ob in self.scenario.obstacles):
                mult = blockage_mask(self.scenario, x)
            if self.sponge is not None:
                mult = self.sponge if mult is None else mult * self.sponge
            self._masks[key] = mult
        return self._masks[key]

    def step(self, samples: np.ndarray, x_next: float) -> np.ndarray:
        spec = sfft.fft(samples, axis=-1, workers=self.workers)
        spec *= self.h
        out = sfft.ifft(spec, axis=-1, overwrite_x=True, workers=self.workers)
        mult = self.multiplier(x_next)
        if mult is not None:
            out *= mult
        return out


def element_cells(scenario: Scenario) -> np.ndarray:
    g = scenario.grid
    m = g.window_samples
    cells = np.rint(scenario.geometry.y_positions / g.dy).astype(int) + m // 2
    if np.unique(cells).size != cells.size:
        raise GridError("two array elements share one grid cell; reduce dy")
    return cells


def aperture_plane(scenario: Scenario, weights) -> FieldPlane:
    """Inject each coefficient ``w_n`` into the grid cell nearest ``y_n`` at x = 0."""
    w = weights.w if isinstance(weights, Weights) else np.asarray(weights, dtype=complex)
    if w.size != scenario.geometry.num_elements:
        raise GridError(f"expected {scenario.geometry.num_elements} weights, got {w.size}")
    samples = np.zeros(scenario.grid.window_samples, dtype=complex)
    samples[element_cells(scenario)] = w
    return FieldPlane(0.0, samples, scenario.grid.dy)


def asm_step(plane: FieldPlane, scenario: Scenario, x_next: float) -> FieldPlane:
    dx = scenario.grid.dx
    if abs(x_next - plane.x - dx) > 1e-9 * max(1.0, dx):
        raise GridError(f"asm_step expects x_next = x + dx ({plane.x + dx}), got {x_next}")
    out = _Stepper(scenario).step(plane.samples, x_next)
    return FieldPlane(x_next, out, plane.dy)


def _record_indices(scenario: Scenario, record) -> np.ndarray:
    n = scenario.grid.num_steps
    if record is None or (isinstance(record, str) and record == "all"):
        return np.arange(n + 1)
    if isinstance(record, int):
        idx = np.arange(0, n + 1, record)
        return idx if idx[-1] == n else np.append(idx, n)
    xs = np.asarray(list(record), dtype=float)
    idx = np.rint(xs / scenario.grid.dx).astype(int)
    if idx.min() < 0 or idx.max() > n:
        raise RangeError("requested plane outside [0, x_max]")
    return np.unique(idx)


def propagate(scenario: Scenario, weights, record="all", workers: int | None = None) -> FieldGrid:
    """March the aperture field from x = 0 to x_max.

    ``record`` is ``"all"``, an integer stride, or an iterable of x positions
    (each snapped to the nearest plane).
    """
    keep = _record_indices(scenario, record)
    stepper = _Stepper(scenario, workers)
    dx = scenario.grid.dx
    plane = aperture_plane(scenario, weights).samples
    rows = np.empty((keep.size, plane.size), dtype=complex)
    slot = 0
    if keep[0] == 0:
        rows[0] = plane
        slot = 1
    for i in range(1, keep[-1] + 1):
        plane = stepper.step(plane, i * dx)
        if slot < keep.size and keep[slot] == i:
            rows[slot] = plane
            slot += 1
    return FieldGrid(keep * dx, rows, scenario)


def _interp_weights(scenario: Scenario, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    g = scenario.grid
    m = g.window_samples
    pos = np.asarray(y, dtype=float) / g.dy + m // 2
    i0 = np.floor(pos).astype(int)
    t = pos - i0
    # land exactly on the last node without reading past the window
    at_end = i0 == m - 1
    i0 = np.where(at_end, m - 2, i0)
    t = np.where(at_end, 1.0, t)
    if np.any(i0 < 0) or np.any(i0 > m - 2):
        raise RangeError("y outside the simulation window")
    return i0, t


def field_at(grid: FieldGrid, point: tuple[float, float]) -> complex:
    """Nearest recorded plane in x, linear interpolation in y."""
    x, y = point
    dx = grid.scenario.grid.dx
    if x < grid.x[0] - dx / 2 or x > grid.x[-1] + dx / 2:
        raise RangeError(f"x={x} outside recorded planes [{grid.x[0]}, {grid.x[-1]}]")
    row = grid.samples[int(np.argmin(np.abs(grid.x - x)))]
    i0, t = _interp_weights(grid.scenario, np.array([y]))
    return complex((1 - t[0]) * row[i0[0]] + t[0] * row[i0[0] + 1])


def rs_reference(
    source: FieldPlane,
    scenario: Scenario,
    targets: Sequence[tuple[float, float]],
    kernel: str = "2d",
) -> np.ndarray:
    """Direct Rayleigh-Sommerfeld quadrature from ``source`` to ``targets``.

    ``kernel="2d"`` is the exact kernel of the two-dimensional scalar problem
    the ASM solves, ``-(j k dx / 2r) H1^(2)(k r)``.  ``kernel="line3d"`` is the
    point-source form ``exp(-j k r) / (2 pi r^2) * dx * (j k + 1/r)`` applied
    along the source line.  In both, ``dx`` is the target-to-source gap.
    Targets inside an obstacle return 0.
    """
    support = np.flatnonzero(source.samples)
    if support.size == 0:
        raise QuadratureError("source plane has no nonzero samples")
    g = scenario.grid
    ys = g.y[support]
    vals = source.samples[support]
    k = scenario.wavenumber
    pts = np.asarray(targets, dtype=float).reshape(-1, 2)
    gap = pts[:, 0] - source.x
    if np.any(gap <= 0):
        raise RangeError("targets must lie beyond the source plane")
    out = np.empty(len(pts), dtype=complex)
    for j, ((xt, yt), d) in enumerate(zip(pts, gap)):
        r = np.hypot(yt - ys, d)
        if kernel == "2d":
            kern = -(1j * k * d / (2 * r)) * hankel2(1, k * r)
        elif kernel == "line3d":
            kern = np.exp(-1j * k * r) / (2 * math.pi * r**2) * d * (1j * k + 1 / r)
        else:
            raise ValueError(f"unknown kernel {kernel!r}")
        out[j] = np.sum(vals * kern) * source.dy
    out[scenario.inside_obstacle(pts[:, 0], pts[:, 1])] = 0
    return out


def channel_matrix(
    scenario: Scenario,
    user_points: Iterable[tuple[float, float]],
    workers: int | None = None,
) -> np.ndarray:
    """Equivalent channels for many users as a (users x N) array.

    All N unit excitations are marched together as one batch, so the cost is
    one propagation over the farthest user plane regardless of user count.
    """
    pts = np.asarray(list(user_points), dtype=float).reshape(-1, 2)
    if np.any(scenario.inside_obstacle(pts[:, 0], pts[:, 1])):
        bad = pts[scenario.inside_obstacle(pts[:, 0], pts[:, 1])][0]
        raise UserInsideObstacleError(f"user point {tuple(bad)} lies inside an obstacle")
    g = scenario.grid
    if np.any(pts[:, 0] < 0) or np.any(pts[:, 0] > g.num_steps * g.dx + g.dx / 2):
        raise RangeError("user x outside the propagation range")
    plane_idx = np.rint(pts[:, 0] / g.dx).astype(int)
    i0, t = _interp_weights(scenario, pts[:, 1])

    n = scenario.geometry.num_elements
    m = g.window_samples
    field_ = np.zeros((n, m), dtype=complex)
    field_[np.arange(n), element_cells(scenario)] = 1.0
    out = np.empty((len(pts), n), dtype=complex)

    def sample(users):
        a = field_[:, i0[users]]
        b = field_[:, i0[users] + 1]
        out[users] = np.conj(a * (1 - t[users]) + b * t[users]).T

    users0 = np.flatnonzero(plane_idx == 0)
    if users0.size:
        sample(users0)
    stepper = _Stepper(scenario, workers)
    order = np.argsort(plane_idx, kind="stable")
    sorted_idx = plane_idx[order]
    last = int(plane_idx.max()) if len(pts) else 0
    for i in range(1, last + 1):
        field_ = stepper.step(field_, i * g.dx)
        lo, hi = np.searchsorted(sorted_idx, [i, i + 1])
        if hi > lo:
            sample(order[lo:hi])
    return out


def equivalent_channel(
    scenario: Scenario,
    user_points: Iterable[tuple[float, float]],
    workers: int | None = None,
) -> list[ChannelVector]:
    pts = [tuple(map(float, p)) for p in user_points]
    hs = channel_matrix(scenario, pts, workers)
    return [ChannelVector(h, p) for h, p in zip(hs, pts)]
