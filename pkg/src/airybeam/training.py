"""Beam-training searches, the MRT benchmark and link metrics."""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Mapping

import numpy as np

from .codebooks import Codebook, SamplingSpec, assemble_codebook, sample_axis
from .errors import EmptyCodebookError, SpecError, UserInsideObstacleError
from .scenario import Scenario
from .special import airy_envelope
from .waveforms import BeamParams, focus_phase, cubic_phase

__all__ = [
    "TrainingResult",
    "received_power",
    "spectral_efficiency",
    "exhaustive_search",
    "hierarchical_airy_search",
    "hierarchical_curved_search",
    "blockage_ratio",
    "mrt_power",
    "CSV_HEADER",
]

CSV_HEADER = "scheme,scenario_id,user_x_m,user_y_m,blockage_ratio_frac,power_rel,se_bps_hz,probes_count"


@dataclass
class TrainingResult:
    """Outcome of one search.

    ``best_index`` is the position of the winning probe in the transmitted
    probe sequence (the codebook index for exhaustive search).
    """

    best_index: int
    best_params: BeamParams | None
    received_power: float
    spectral_efficiency: float
    probes_used: int
    stage_trace: list = field(default_factory=list)

    def csv_row(self, scheme: str, scenario_id: str, user: tuple[float, float], ratio: float) -> str:
        return (
            f"{scheme},{scenario_id},{float(user[0])!r},{float(user[1])!r},{float(ratio)!r},"
            f"{float(self.received_power)!r},{float(self.spectral_efficiency)!r},{self.probes_used}"
        )


def _hvec(h) -> np.ndarray:
    return np.asarray(getattr(h, "h", h), dtype=complex)


def received_power(h, w) -> float:
    """``|h^H w|^2``."""
    hv = _hvec(h)
    wv = np.asarray(getattr(w, "w", w), dtype=complex)
    if hv.shape != wv.shape:
        raise SpecError("channel and beam lengths differ")
    return float(abs(np.vdot(hv, wv)) ** 2)


def mrt_power(h, power: float) -> float:
    hv = _hvec(h)
    return float(power * np.vdot(hv, hv).real)


def spectral_efficiency(power: float, noise_power: float) -> float:
    if not noise_power > 0:
        raise SpecError("noise power must be positive")
    return math.log2(1 + power / noise_power)


def _argmax(powers: np.ndarray) -> int:
    # np.argmax returns the first maximum, which is the tie-break we want
    return int(np.argmax(powers))


def exhaustive_search(h, book: Codebook, noise_power: float | None = None) -> TrainingResult:
    if len(book) == 0:
        raise EmptyCodebookError("codebook is empty")
    powers = np.abs(book.responses(_hvec(h))) ** 2
    best = _argmax(powers)
    sigma2 = noise_power if noise_power is not None else book.scenario.noise_power
    p = float(powers[best])
    return TrainingResult(best, book.entry(best), p, spectral_efficiency(p, sigma2), len(book))


def _phase_only_powers(h: np.ndarray, scenario: Scenario, focus: np.ndarray, shapes: np.ndarray) -> np.ndarray:
    amp = math.sqrt(scenario.power / scenario.geometry.num_elements)
    return np.abs(amp * (shapes * (focus * np.conj(h))).sum(axis=-1)) ** 2


def hierarchical_airy_search(
    h,
    scenario: Scenario,
    specs: Mapping[str, SamplingSpec],
    a0: float | None = None,
    fallback: bool = True,
) -> TrainingResult:
    """Three-stage search: focus (theta, r), then scale s at decay a0, then decay a.

    Stage 2 also probes the plain focused beam (s -> infinity) so the result
    never drops below the stage-1 best.  Otherwise the winner is always the
    stage-3 scan result, which is an entry of the exhaustive codebook.  Probes used:
    ``N_theta*N_r + N_s + N_a (+1 with the fallback)``.
    """
    hv = _hvec(h)
    focused = assemble_codebook(scenario, "focused", specs)
    stage1 = exhaustive_search(hv, focused, scenario.noise_power)
    theta, r = stage1.best_params.theta, stage1.best_params.r

    y = scenario.geometry.y_positions
    n = y.size
    k = scenario.wavenumber
    phase = focus_phase(y, k, theta, r)
    s_grid = sample_axis(specs["scale"])
    a_grid = sample_axis(specs["decay"])
    if a0 is None:
        a0 = 0.5 * (specs["decay"].low + specs["decay"].high)

    def airy_powers(pairs):
        env = np.array([airy_envelope(y, s, a) for s, a in pairs])
        env = env / np.linalg.norm(env, axis=1, keepdims=True) * math.sqrt(n)
        return _phase_only_powers(hv, scenario, phase, env)

    p2 = airy_powers([(s, a0) for s in s_grid])
    probes = len(focused) + len(s_grid)
    best2 = _argmax(p2)
    s_best: float | None = float(s_grid[best2])
    stage2_power = float(p2[best2])
    if fallback:
        probes += 1
        if stage1.received_power > stage2_power:
            s_best, stage2_power = None, stage1.received_power

    probes_before3 = probes
    probes += len(a_grid)
    if s_best is None:
        # the focused beam does not depend on a; stage 3 re-probes it
        best_params = stage1.best_params
        power = stage1.received_power
        best_index = stage1.best_index
        stage3 = {"a": None, "power": power}
    else:
        p3 = airy_powers([(s_best, a) for a in a_grid])
        best3 = _argmax(p3)
        power = float(p3[best3])
        best_params = BeamParams("nf-airy", theta=theta, r=r, s=s_best, a=float(a_grid[best3]))
        best_index = probes_before3 + best3
        stage3 = {"a": best_params.a, "power": power}

    trace = [
        {"stage": "phase-focusing", "theta": theta, "r": r, "power": stage1.received_power},
        {"stage": "curvature-locking", "s": s_best, "a0": a0, "power": stage2_power},
        {"stage": "energy-distribution", **stage3},
    ]
    return TrainingResult(best_index, best_params, power, spectral_efficiency(power, scenario.noise_power), probes, trace)


def hierarchical_curved_search(h, scenario: Scenario, specs: Mapping[str, SamplingSpec]) -> TrainingResult:
    """Two-stage search: focus (theta, r), then curvature c.  Probes ``N_theta*N_r + N_c``."""
    hv = _hvec(h)
    focused = assemble_codebook(scenario, "focused", specs)
    stage1 = exhaustive_search(hv, focused, scenario.noise_power)
    theta, r = stage1.best_params.theta, stage1.best_params.r
    y = scenario.geometry.y_positions
    c_grid = sample_axis(specs["curvature"])
    p2 = _phase_only_powers(hv, scenario, focus_phase(y, scenario.wavenumber, theta, r), cubic_phase(y, c_grid))
    best = _argmax(p2)
    power = float(p2[best])
    params = BeamParams("curved", theta=theta, r=r, c=float(c_grid[best]))
    trace = [
        {"stage": "phase-focusing", "theta": theta, "r": r, "power": stage1.received_power},
        {"stage": "curvature", "c": params.c, "power": power},
    ]
    return TrainingResult(
        len(focused) + best,
        params,
        power,
        spectral_efficiency(power, scenario.noise_power),
        len(focused) + len(c_grid),
        trace,
    )


def _segments_hit_box(y0: np.ndarray, xu: float, yu: float, box) -> np.ndarray:
    """Liang-Barsky clip of segments (0, y0) -> (xu, yu) against a closed box."""
    x_left, x_right, y_down, y_up = box
    dxs = xu
    dys = yu - y0
    t0 = np.zeros_like(y0)
    t1 = np.ones_like(y0)
    ok = np.ones(y0.shape, dtype=bool)
    for p, q in (
        (np.full_like(y0, -dxs), np.full_like(y0, 0.0 - x_left)),
        (np.full_like(y0, dxs), np.full_like(y0, x_right - 0.0)),
        (-dys, y0 - y_down),
        (dys, y_up - y0),
    ):
        parallel = p == 0
        ok &= ~(parallel & (q < 0))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(parallel, 0.0, q / np.where(parallel, 1.0, p))
        t0 = np.where(~parallel & (p < 0), np.maximum(t0, t), t0)
        t1 = np.where(~parallel & (p > 0), np.minimum(t1, t), t1)
    return ok & (t0 <= t1)


def blockage_ratio(scenario: Scenario, user: tuple[float, float]) -> float:
    """Fraction of element-to-user line-of-sight segments crossing an obstacle."""
    xu, yu = map(float, user)
    if scenario.inside_obstacle(xu, yu):
        raise UserInsideObstacleError(f"user {user} lies inside an obstacle")
    y0 = scenario.geometry.y_positions
    hit = np.zeros(y0.shape, dtype=bool)
    for ob in scenario.obstacles:
        hit |= _segments_hit_box(y0, xu, yu, ob.as_tuple())
    return float(hit.mean())
