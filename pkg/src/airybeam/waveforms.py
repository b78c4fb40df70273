"""Aperture excitations: steered, focused, curved, classic Airy, near-field Airy, and MRT."""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import ParamError, ZeroChannelError
from .scenario import Scenario, Weights
from .special import airy_envelope

__all__ = ["BeamParams", "KINDS", "make_beam", "mrt_beam", "focus_phase", "cubic_phase"]

KINDS = ("steered", "focused", "curved", "classic-airy", "nf-airy")

_REQUIRED = {
    "steered": ("theta",),
    "focused": ("theta", "r"),
    "curved": ("theta", "r", "c"),
    "classic-airy": ("s", "a"),
    "nf-airy": ("theta", "r", "s", "a"),
}


@dataclass(frozen=True)
class BeamParams:
    """Beam parameters; fields a kind does not use stay None.

    theta [rad], r [m], c [1/m], s [m], a [-].
    """

    kind: str
    theta: float | None = None
    r: float | None = None
    c: float | None = None
    s: float | None = None
    a: float | None = None

    def __post_init__(self):
        if self.kind not in _REQUIRED:
            raise ParamError(f"unknown beam kind {self.kind!r}")
        need = _REQUIRED[self.kind]
        for name in ("theta", "r", "c", "s", "a"):
            val = getattr(self, name)
            if name in need and val is None:
                raise ParamError(f"{self.kind} beam needs {name}")
            if name not in need and val is not None:
                raise ParamError(f"{self.kind} beam does not take {name}")
        if self.theta is not None and not abs(self.theta) < math.pi / 2:
            raise ParamError(f"|theta| must be below pi/2, got {self.theta}")
        if self.r is not None and not self.r > 0:
            raise ParamError(f"r must be positive, got {self.r}")
        if self.s is not None and self.s == 0:
            raise ParamError("s must be nonzero")

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, n) for n in _REQUIRED[self.kind])


def focus_phase(y: np.ndarray, k: float, theta, r) -> np.ndarray:
    """Unit-modulus near-field focusing term; broadcasts over theta/r arrays."""
    theta = np.asarray(theta, dtype=float)[..., None]
    r = np.asarray(r, dtype=float)[..., None]
    return np.exp(1j * k * (-y * np.sin(theta) + y**2 * np.cos(theta) ** 2 / (2 * r)))


def cubic_phase(y: np.ndarray, c) -> np.ndarray:
    c = np.asarray(c, dtype=float)[..., None]
    return np.exp(-1j * (2 * math.pi * c * y) ** 3 / 3)


def make_beam(scenario: Scenario, params: BeamParams) -> Weights:
    y = scenario.geometry.y_positions
    k = scenario.wavenumber
    p = scenario.power
    n = y.size
    kind = params.kind
    if kind == "steered":
        w = np.exp(-1j * k * y * math.sin(params.theta))
    elif kind == "focused":
        w = focus_phase(y, k, params.theta, params.r)
    elif kind == "curved":
        w = focus_phase(y, k, params.theta, params.r) * cubic_phase(y, params.c)
    elif kind == "classic-airy":
        env = airy_envelope(y, params.s, params.a)
        return Weights.normalized(env.astype(complex), p)
    else:
        env = airy_envelope(y, params.s, params.a)
        return Weights.normalized(env * focus_phase(y, k, params.theta, params.r), p)
    return Weights(math.sqrt(p / n) * w, p)


def mrt_beam(h, power: float) -> Weights:
    """Maximum ratio transmission ``w = sqrt(P) h / ||h||``."""
    vec = np.asarray(getattr(h, "h", h), dtype=complex)
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ZeroChannelError("MRT undefined for a zero channel")
    return Weights(vec * (math.sqrt(power) / norm), power)
