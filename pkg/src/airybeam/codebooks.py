"""Parameter sampling rules and beam codebooks.

Codebooks keep their parameter tuples in a (K x d) array rather than a list
of objects: the full Airy book has 360k entries.  Received-power scans use
the separable structure of each kind (phase part times amplitude/shape part)
so a scan never has to materialize all K weight vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import io
import json
import math
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import SpecError, ZeroVectorError
from .scenario import Scenario, Weights
from .special import airy_envelope
from .waveforms import BeamParams, cubic_phase, focus_phase

__all__ = [
    "SamplingSpec",
    "Codebook",
    "sample_axis",
    "assemble_codebook",
    "codeword_correlation",
    "default_specs",
    "FORMAT_VERSION",
]

FORMAT_VERSION = 1
AXES = ("angle", "distance", "curvature", "decay", "scale")

_KIND_AXES = {
    "steered": ("angle",),
    "focused": ("angle", "distance"),
    "curved": ("angle", "distance", "curvature"),
    "nf-airy": ("angle", "distance", "scale", "decay"),
}
_KIND_FIELDS = {
    "steered": ("theta",),
    "focused": ("theta", "r"),
    "curved": ("theta", "r", "c"),
    "nf-airy": ("theta", "r", "s", "a"),
}


@dataclass(frozen=True)
class SamplingSpec:
    """One sampled parameter axis.

    angle     -- ``count`` sines uniformly spaced (cell midpoints) over
                 [sin(low), sin(high)]; defaults to the full [-1, 1].
    distance  -- ``z * cos(theta)**2 / m`` for m = m_start .. m_start+count-1.
    curvature -- ``count`` uniform points on [low, high].
    decay     -- ``count`` uniform points on [low, high].
    scale     -- ``count`` values with 1/s uniform on [1/high, 1/low];
                 ``symmetric`` appends the mirrored negative values.
    """

    axis: str
    count: int
    low: float | None = None
    high: float | None = None
    z: float | None = None
    m_start: float = 1.0
    symmetric: bool = False

    def __post_init__(self):
        if self.axis not in AXES:
            raise SpecError(f"unknown axis {self.axis!r}")
        if int(self.count) != self.count or self.count < 1:
            raise SpecError(f"count must be a positive integer, got {self.count}")
        if self.axis == "distance":
            if self.z is None or not self.z > 0 or not self.m_start > 0:
                raise SpecError("distance axis needs z > 0 and m_start > 0")
            return
        if self.axis == "angle":
            lo = -math.pi / 2 if self.low is None else self.low
            hi = math.pi / 2 if self.high is None else self.high
            if not -math.pi / 2 <= lo < hi <= math.pi / 2:
                raise SpecError(f"angle window [{lo}, {hi}] invalid")
            return
        if self.low is None or self.high is None:
            raise SpecError(f"{self.axis} axis needs low and high")
        if self.count > 1 and not self.low < self.high:
            raise SpecError(f"{self.axis} range must be ordered")
        if self.axis == "scale" and not 0 < self.low:
            raise SpecError("scale range needs 0 < s_min < s_max")

    @classmethod
    def distance_range(cls, r_min: float, r_max: float, count: int) -> "SamplingSpec":
        """Distance axis whose broadside samples run from r_max down to r_min."""
        if not 0 < r_min < r_max or count < 2:
            raise SpecError("need 0 < r_min < r_max and count >= 2")
        # z/m_start = r_max and z/(m_start + count - 1) = r_min
        m_start = (count - 1) * r_min / (r_max - r_min)
        return cls("distance", count, z=r_max * m_start, m_start=m_start)

    @property
    def size(self) -> int:
        return 2 * self.count if self.axis == "scale" and self.symmetric else self.count

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("axis", "count", "low", "high", "z", "m_start", "symmetric")}


def sample_axis(spec: SamplingSpec, theta: float = 0.0) -> np.ndarray:
    n = spec.count
    if spec.axis == "angle":
        lo = math.sin(-math.pi / 2 if spec.low is None else spec.low)
        hi = math.sin(math.pi / 2 if spec.high is None else spec.high)
        k = np.arange(1, n + 1)
        u = lo + (hi - lo) * (2 * k - 1) / (2 * n)
        return np.arcsin(np.clip(u, -1.0, 1.0))
    if spec.axis == "distance":
        m = spec.m_start + np.arange(n)
        return spec.z * math.cos(theta) ** 2 / m
    if spec.axis in ("curvature", "decay"):
        if n == 1:
            return np.array([0.5 * (spec.low + spec.high)])
        return np.linspace(spec.low, spec.high, n)
    # scale
    inv = np.linspace(1 / spec.high, 1 / spec.low, n) if n > 1 else np.array([1 / spec.high])
    s = 1 / inv
    return np.concatenate([s, -s]) if spec.symmetric else s


@dataclass(eq=False)
class Codebook:
    kind: str
    specs: dict
    params: np.ndarray
    scenario: Scenario | None = field(default=None, repr=False)
    _weights: np.ndarray | None = field(default=None, repr=False)
    _focus: np.ndarray | None = field(default=None, repr=False)
    _shape: np.ndarray | None = field(default=None, repr=False)

    @property
    def fields(self) -> tuple[str, ...]:
        return _KIND_FIELDS[self.kind]

    def __len__(self) -> int:
        return self.params.shape[0]

    def entry(self, i: int) -> BeamParams:
        return BeamParams(self.kind, **{f: float(v) for f, v in zip(self.fields, self.params[i])})

    @property
    def entries(self) -> list[BeamParams]:
        return [self.entry(i) for i in range(len(self))]

    # separable representation ------------------------------------------------
    def _factors(self):
        """Phase rows (one per angle/distance pair) and shape rows (one per c or (s, a))."""
        if self._focus is None:
            sc = self.scenario
            y = sc.geometry.y_positions
            k = sc.wavenumber
            if self.kind == "steered":
                self._focus = np.exp(-1j * k * y[None, :] * np.sin(self.params[:, 0])[:, None])
                self._shape = np.ones((1, y.size))
            else:
                ns = _shape_count(self.specs, self.kind)
                pairs = self.params[::ns, :2]
                self._focus = focus_phase(y, k, pairs[:, 0], pairs[:, 1])
                if self.kind == "focused":
                    self._shape = np.ones((1, y.size))
                elif self.kind == "curved":
                    self._shape = cubic_phase(y, self.params[:ns, 2])
                else:
                    env = np.array([airy_envelope(y, s, a) for s, a in self.params[:ns, 2:4]])
                    self._shape = env / np.linalg.norm(env, axis=1, keepdims=True) * math.sqrt(y.size)
        return self._focus, self._shape

    def weights(self, indices=None) -> np.ndarray:
        """Weight vectors as rows; all of them (cached) when ``indices`` is None."""
        if self._weights is not None:
            return self._weights if indices is None else self._weights[indices]
        focus, shape = self._factors()
        ns = shape.shape[0]
        idx = np.arange(len(self)) if indices is None else np.atleast_1d(np.asarray(indices))
        amp = math.sqrt(self.scenario.power / self.scenario.geometry.num_elements)
        return amp * focus[idx // ns] * shape[idx % ns]

    def materialize(self) -> "Codebook":
        self._weights = self.weights()
        return self

    def weight(self, i: int) -> Weights:
        return Weights(self.weights([i])[0], self.scenario.power)

    def responses(self, h: np.ndarray) -> np.ndarray:
        """``h^H w_k`` for every codeword, in codebook order."""
        h = np.asarray(getattr(h, "h", h), dtype=complex)
        if self._weights is not None:
            return self._weights @ np.conj(h)
        focus, shape = self._factors()
        amp = math.sqrt(self.scenario.power / self.scenario.geometry.num_elements)
        return (amp * (focus * np.conj(h)) @ shape.T).ravel()

    # serialization -------------------------------------------------------------
    def dumps(self, include_weights: bool = False) -> str:
        buf = io.StringIO()
        buf.write(f"# airybeam-codebook v{FORMAT_VERSION}\n")
        buf.write(f"kind {self.kind}\n")
        buf.write("specs " + json.dumps({k: v.to_dict() for k, v in self.specs.items()}, sort_keys=True) + "\n")
        buf.write(f"entries {len(self)}\n")
        buf.write("columns " + " ".join(self.fields) + "\n")
        for row in self.params:
            buf.write(" ".join(repr(float(v)) for v in row) + "\n")
        if include_weights:
            w = self.weights()
            buf.write(f"weights {w.shape[0]} {w.shape[1]}\n")
            for row in w:
                buf.write(" ".join(f"{float(v.real)!r} {float(v.imag)!r}" for v in row) + "\n")
        return buf.getvalue()

    def save(self, path, include_weights: bool = False) -> None:
        Path(path).write_text(self.dumps(include_weights))

    @classmethod
    def loads(cls, text: str, scenario: Scenario | None = None) -> "Codebook":
        lines = text.splitlines()
        if not lines[0].startswith("# airybeam-codebook v"):
            raise SpecError("not a codebook file")
        version = int(lines[0].rsplit("v", 1)[1])
        if version != FORMAT_VERSION:
            raise SpecError(f"unsupported codebook format version {version}")
        kind = lines[1].split(" ", 1)[1]
        specs = {k: SamplingSpec(**v) for k, v in json.loads(lines[2].split(" ", 1)[1]).items()}
        count = int(lines[3].split()[1])
        params = np.array([[float(v) for v in ln.split()] for ln in lines[5 : 5 + count]])
        params = params.reshape(count, len(_KIND_FIELDS[kind]))
        book = cls(kind, specs, params, scenario)
        rest = lines[5 + count :]
        if rest and rest[0].startswith("weights"):
            _, k, n = rest[0].split()
            vals = np.array([[float(v) for v in ln.split()] for ln in rest[1 : 1 + int(k)]])
            book._weights = (vals[:, 0::2] + 1j * vals[:, 1::2]).reshape(int(k), int(n))
        return book

    @classmethod
    def load(cls, path, scenario: Scenario | None = None) -> "Codebook":
        return cls.loads(Path(path).read_text(), scenario)


def _shape_count(specs: Mapping[str, SamplingSpec], kind: str) -> int:
    if kind == "curved":
        return specs["curvature"].size
    if kind == "nf-airy":
        return specs["scale"].size * specs["decay"].size
    return 1


def assemble_codebook(scenario: Scenario, kind: str, specs: Mapping[str, SamplingSpec], materialize: bool = False) -> Codebook:
    """Cartesian product of the sampled axes, angle-major.

    Order is angle, then distance, then scale, then decay (or curvature).
    Distances are re-sampled per angle (they scale with cos^2 theta).
    """
    if kind not in _KIND_AXES:
        raise SpecError(f"no codebook for kind {kind!r}")
    missing = [ax for ax in _KIND_AXES[kind] if ax not in specs]
    if missing:
        raise SpecError(f"{kind} codebook needs axes {missing}")
    specs = {ax: specs[ax] for ax in _KIND_AXES[kind]}
    for ax, sp in specs.items():
        if sp.axis != ax:
            raise SpecError(f"spec for {ax} has axis {sp.axis}")
    book = _assemble(scenario, kind, tuple(specs.items()))
    if materialize:
        book.materialize()
    return book


@lru_cache(maxsize=32)
def _assemble(scenario: Scenario, kind: str, spec_items: tuple) -> Codebook:
    specs = dict(spec_items)
    thetas = sample_axis(specs["angle"])
    if kind == "steered":
        params = thetas[:, None]
    else:
        pairs = np.array([(t, r) for t in thetas for r in sample_axis(specs["distance"], t)])
        if kind == "focused":
            params = pairs
        else:
            if kind == "curved":
                shape = sample_axis(specs["curvature"])[:, None]
            else:
                s = sample_axis(specs["scale"])
                a = sample_axis(specs["decay"])
                shape = np.array([(si, ai) for si in s for ai in a])
            params = np.concatenate(
                [np.repeat(pairs, len(shape), axis=0), np.tile(shape, (len(pairs), 1))], axis=1
            )
    params.setflags(write=False)
    return Codebook(kind, specs, params, scenario)


def codeword_correlation(w_a, w_b) -> float:
    """Normalized inner product ``|w_a^H w_b| / (||w_a|| ||w_b||)``."""
    a = np.asarray(getattr(w_a, "w", w_a), dtype=complex)
    b = np.asarray(getattr(w_b, "w", w_b), dtype=complex)
    if a.shape != b.shape:
        raise SpecError("codewords differ in length")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVectorError("correlation of a zero vector")
    return float(min(1.0, abs(np.vdot(a, b)) / (na * nb)))


def default_specs(
    n_angles: int = 90,
    n_distances: int = 20,
    n_scale: int = 10,
    n_decay: int = 10,
    n_curvature: int = 21,
    n_steered: int | None = None,
) -> dict[str, SamplingSpec]:
    """Default sampling used in the reference experiments.

    Angles: sines uniform over [sin(-pi/4), sin(pi/4)]; distances 1..6 m with
    1/r uniform; s in +-[0.05, 0.3] m (1/s uniform, ``n_scale`` per sign);
    a in [-2, 0]; c in [-5, 5] 1/m.  ``steered`` is a full-range DFT angle set.
    """
    specs = {
        "angle": SamplingSpec("angle", n_angles, low=-math.pi / 4, high=math.pi / 4),
        "distance": SamplingSpec.distance_range(1.0, 6.0, n_distances),
        "scale": SamplingSpec("scale", n_scale, low=0.05, high=0.3, symmetric=True),
        "decay": SamplingSpec("decay", n_decay, low=-2.0, high=0.0),
        "curvature": SamplingSpec("curvature", n_curvature, low=-5.0, high=5.0),
    }
    if n_steered is not None:
        specs["steered_angle"] = SamplingSpec("angle", n_steered)
    return specs
