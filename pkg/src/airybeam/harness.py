"""Experiment runner: scenario sweeps, Monte-Carlo users, CSV and heatmap output.

Every run writes its data files plus ``manifest.json`` (config hash, library
version, file checksums).  Randomness comes from a single
``numpy.random.Generator(PCG64(seed))``; user positions are drawn as
``x = uniform(x_min, x_max)`` then ``y = uniform(y_min, y_max)`` per draw, and
draws that land inside an obstacle are discarded and redrawn.

Heatmaps are 8-bit grayscale PNGs.  Row 0 of the image is the first row of
the array, which for field and power maps is the smallest y; columns run
along increasing x.  Each image has a sidecar CSV with the raw values.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import hashlib
import json
import logging
import math
import os
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .codebooks import SamplingSpec, assemble_codebook, codeword_correlation, default_specs, sample_axis
from .errors import AiryBeamError, SpecError
from .hybrid import build_dictionary, effective_weights, omp_hybrid
from .propagation import channel_matrix, propagate
from .scenario import (
    ArrayGeometry,
    Obstacle,
    Scenario,
    SPEED_OF_LIGHT,
    load_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)
from .special import airy_envelope
from .training import (
    blockage_ratio,
    exhaustive_search,
    hierarchical_airy_search,
    hierarchical_curved_search,
    mrt_power,
    received_power,
    spectral_efficiency,
    CSV_HEADER,
)
from .waveforms import make_beam, mrt_beam

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentConfig",
    "RunManifest",
    "ExperimentError",
    "KINDS",
    "SCHEMES",
    "run_experiment",
    "export_heatmap",
    "draw_users",
    "evaluate_users",
    "codebook_specs",
]

KINDS = (
    "beam-pattern",
    "power-map",
    "se-vs-power",
    "blockage-sweep",
    "frequency-sweep",
    "codebook-size-sweep",
    "obstacle-size-sweep",
    "hybrid-gap",
    "correlation-curves",
)

SCHEMES = (
    "mrt",
    "exhaustive-airy",
    "hierarchical-airy",
    "exhaustive-curved",
    "hierarchical-curved",
    "exhaustive-focused",
    "exhaustive-steered",
)

RNG_ALGORITHM = "numpy.random.PCG64"
QUICK_DIVISOR = 4


class ExperimentError(AiryBeamError):
    def __init__(self, message: str, context: dict | None = None):
        super().__init__(message)
        self.context = context or {}


@dataclass
class ExperimentConfig:
    scenario: Scenario
    kind: str
    rng_seed: int
    output_dir: Path = Path("results")
    num_users: int = 200
    user_region: tuple[float, float, float, float] = (1.0, 5.0, -0.4, 0.4)
    sweep: dict = field(default_factory=dict)
    codebook: dict = field(default_factory=dict)
    schemes: tuple[str, ...] = SCHEMES
    quick: bool = False
    threads: int = 1
    scenario_id: str = "scenario"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown experiment kind {self.kind!r}")
        if self.rng_seed is None:
            raise SpecError("rng_seed is mandatory")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise SpecError(f"unknown schemes {sorted(unknown)}")
        x0, x1, y0, y1 = self.user_region
        if not (x0 < x1 and y0 < y1 and x0 > 0):
            raise SpecError(f"bad user region {self.user_region}")
        if self.num_users < 1:
            raise SpecError("num_users must be >= 1")

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        path = Path(path)
        raw = json.loads(path.read_text())
        scen = raw["scenario"]
        if isinstance(scen, str):
            scen_path = Path(scen)
            if not scen_path.is_absolute():
                scen_path = path.parent / scen_path
            scenario = load_scenario(scen_path)
            scenario_id = scen_path.stem
        else:
            scenario = scenario_from_dict(scen)
            scenario_id = raw.get("scenario_id", "inline")
        kw = dict(
            scenario=scenario,
            kind=raw["kind"],
            rng_seed=raw.get("rng_seed"),
            output_dir=Path(raw.get("output_dir", os.environ.get("AIRYBEAM_OUTPUT_DIR", "results"))),
            num_users=int(raw.get("num_users", 200)),
            user_region=tuple(raw.get("user_region", (1.0, 5.0, -0.4, 0.4))),
            sweep=raw.get("sweep", {}),
            codebook=raw.get("codebook", {}),
            schemes=tuple(raw.get("schemes", SCHEMES)),
            scenario_id=raw.get("scenario_id", scenario_id),
        )
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)

    def canonical(self) -> dict:
        return {
            "scenario": scenario_to_dict(self.scenario),
            "scenario_id": self.scenario_id,
            "kind": self.kind,
            "rng_seed": int(self.rng_seed),
            "num_users": self.num_users,
            "user_region": list(self.user_region),
            "sweep": self.sweep,
            "codebook": self.codebook,
            "schemes": list(self.schemes),
            "quick": self.quick,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class RunManifest:
    config_hash: str
    library_version: str
    files: list[dict]
    rng_algorithm: str = RNG_ALGORITHM

    def to_json(self) -> str:
        return json.dumps(
            {
                "config_hash": self.config_hash,
                "library_version": self.library_version,
                "rng_algorithm": self.rng_algorithm,
                "files": self.files,
            },
            indent=2,
            sort_keys=True,
        )


# --------------------------------------------------------------------------- helpers


def codebook_specs(overrides: dict | None = None, quick: bool = False) -> dict[str, SamplingSpec]:
    counts = dict(n_angles=90, n_distances=20, n_scale=10, n_decay=10, n_curvature=21)
    counts.update(overrides or {})
    if quick:
        counts = {k: max(2, int(math.ceil(v / QUICK_DIVISOR))) for k, v in counts.items()}
    return default_specs(**counts)


def steered_spec(scenario: Scenario, quick: bool = False) -> SamplingSpec:
    n = scenario.geometry.num_elements
    return SamplingSpec("angle", max(2, n // QUICK_DIVISOR) if quick else n)


def draw_users(scenario: Scenario, region, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform user positions in ``region``, redrawing any that land in an obstacle."""
    x0, x1, y0, y1 = region
    users = []
    while len(users) < count:
        x = rng.uniform(x0, x1)
        y = rng.uniform(y0, y1)
        if not scenario.inside_obstacle(x, y):
            users.append((x, y))
    return np.array(users)


def evaluate_users(
    scenario: Scenario,
    users: np.ndarray,
    specs: dict,
    schemes=SCHEMES,
    channels: np.ndarray | None = None,
    steered: SamplingSpec | None = None,
    threads: int = 1,
) -> dict[str, np.ndarray]:
    """Received power per scheme for every user (one channel pass, shared by all schemes)."""
    if channels is None:
        channels = channel_matrix(scenario, users, workers=threads)
    books = {}
    if "exhaustive-airy" in schemes:
        books["exhaustive-airy"] = assemble_codebook(scenario, "nf-airy", specs)
    if "exhaustive-curved" in schemes:
        books["exhaustive-curved"] = assemble_codebook(scenario, "curved", specs)
    if "exhaustive-focused" in schemes:
        books["exhaustive-focused"] = assemble_codebook(scenario, "focused", specs)
    if "exhaustive-steered" in schemes:
        books["exhaustive-steered"] = assemble_codebook(
            scenario, "steered", {"angle": steered or steered_spec(scenario)}
        )

    def one(h):
        row = {}
        for scheme in schemes:
            if scheme == "mrt":
                row[scheme] = (mrt_power(h, scenario.power), 0)
            elif scheme == "hierarchical-airy":
                r = hierarchical_airy_search(h, scenario, specs)
                row[scheme] = (r.received_power, r.probes_used)
            elif scheme == "hierarchical-curved":
                r = hierarchical_curved_search(h, scenario, specs)
                row[scheme] = (r.received_power, r.probes_used)
            else:
                r = exhaustive_search(h, books[scheme])
                row[scheme] = (r.received_power, r.probes_used)
        return row

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(one, channels))
    else:
        rows = [one(h) for h in channels]
    out = {s: np.array([r[s][0] for r in rows]) for s in schemes}
    out["_probes"] = {s: int(rows[0][s][1]) if rows else 0 for s in schemes}
    return out


def db(x):
    return 10 * np.log10(x)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class _Writer:
    """Serializes all file output of one run and remembers what it wrote."""

    def __init__(self, root: Path):
        self.root = root
        self.files: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.root / name
        self.files.append(p)
        return p

    def csv(self, name: str, header: list[str], rows) -> Path:
        p = self.path(name)
        with p.open("w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        return p

    def heatmap(self, name: str, values, label: str, scale="linear", **kw) -> None:
        png = self.path(name)
        self.files.append(png.with_suffix(".csv"))
        export_heatmap(values, png, scale=scale, value_label=label, **kw)

    def cleanup(self) -> None:
        for p in self.files:
            p.unlink(missing_ok=True)


def export_heatmap(
    values,
    path,
    scale: str = "linear",
    floor_db: float = -60.0,
    amplitude: bool = False,
    value_label: str = "value",
) -> Path:
    """Write a 2-D array as an 8-bit grayscale PNG plus a sidecar CSV.

    ``scale="dB"`` treats values as power, ``10 log10(v / max)`` (or
    ``20 log10`` with ``amplitude=True``), clamped at ``floor_db`` so zeros
    map to black.  ``"linear"`` stretches [min, max]
    to [0, 255]; a constant array gives a uniform black image.  Array row 0 is
    image row 0 (the top line of the PNG).  The sidecar CSV is long-format
    ``row,col,<value_label>``.
    """
    from PIL import Image

    vals = np.asarray(values, dtype=float)
    if vals.ndim != 2:
        raise ValueError("heatmap needs a 2-D array")
    if scale == "dB":
        peak = vals.max()
        with np.errstate(divide="ignore"):
            rel = (20 if amplitude else 10) * np.log10(np.where(vals > 0, vals, 0) / peak) if peak > 0 else np.full(vals.shape, -np.inf)
        rel = np.clip(np.nan_to_num(rel, nan=floor_db, neginf=floor_db), floor_db, 0.0)
        norm = (rel - floor_db) / (0.0 - floor_db)
    elif scale == "linear":
        if not np.all(np.isfinite(vals)):
            raise ValueError("linear heatmap needs finite values")
        lo, hi = vals.min(), vals.max()
        norm = np.zeros_like(vals) if hi == lo else (vals - lo) / (hi - lo)
    else:
        raise ValueError(f"unknown scale {scale!r}")
    img = np.rint(norm * 255).astype(np.uint8)
    path = Path(path)
    Image.fromarray(img, mode="L").save(path)
    rows, cols = np.indices(vals.shape)
    with path.with_suffix(".csv").open("w") as fh:
        fh.write(f"row,col,{value_label}\n")
        for r, c, v in zip(rows.ravel(), cols.ravel(), vals.ravel()):
            fh.write(f"{r},{c},{float(v)!r}\n")
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# --------------------------------------------------------------------------- experiment kinds


def _users_and_channels(cfg: ExperimentConfig, scenario: Scenario | None = None):
    scenario = scenario or cfg.scenario
    rng = np.random.Generator(np.random.PCG64(cfg.rng_seed))
    users = draw_users(scenario, cfg.user_region, cfg.num_users, rng)
    return users, channel_matrix(scenario, users, workers=cfg.threads)


def _per_user_rows(cfg, scenario, users, powers, ratios):
    rows = []
    probes = powers["_probes"]
    for i, u in enumerate(users):
        for s in cfg.schemes:
            p = powers[s][i]
            rows.append(
                (s, cfg.scenario_id, u[0], u[1], ratios[i], p, spectral_efficiency(p, scenario.noise_power), probes[s])
            )
    return rows


def _run_beam_pattern(cfg: ExperimentConfig, out: _Writer):
    sc = cfg.scenario
    user = tuple(cfg.sweep.get("user", (1.1, 0.17)))
    stride = int(cfg.sweep.get("record_stride", 4))
    specs = codebook_specs(cfg.codebook, cfg.quick)
    h = channel_matrix(sc, [user], workers=cfg.threads)[0]
    beams = {}
    for label, kind in (("focused", "focused"), ("curved", "curved"), ("nf-airy", "nf-airy")):
        res = exhaustive_search(h, assemble_codebook(sc, kind, specs))
        beams[label] = (make_beam(sc, res.best_params), res.best_params)
    beams["mrt"] = (mrt_beam(h, sc.power), None)
    rows = []
    for label, (w, params) in beams.items():
        grid = propagate(sc, w, record=stride, workers=cfg.threads)
        y, samples = grid.window()
        out.heatmap(f"beam_{label}.png", np.abs(samples.T), "abs_field_rel", scale="dB", amplitude=True)
        rows.append((label, received_power(h, w), "" if params is None else " ".join(map(repr, params.as_tuple()))))
    out.csv("beam_pattern_summary.csv", ["beam", "received_power_rel", "params"], rows)


def _run_power_map(cfg: ExperimentConfig, out: _Writer):
    sc = cfg.scenario
    x0, x1, y0, y1 = cfg.user_region
    step_x, step_y = cfg.sweep.get("grid_step", (0.05, 0.02))
    xs = np.round(x0 + step_x * np.arange(int(math.floor((x1 - x0) / step_x + 1e-9)) + 1), 12)
    ys = np.round(y0 + step_y * np.arange(int(math.floor((y1 - y0) / step_y + 1e-9)) + 1), 12)
    pts = np.array([(x, y) for y in ys for x in xs])
    valid = ~sc.inside_obstacle(pts[:, 0], pts[:, 1])
    specs = codebook_specs(cfg.codebook, cfg.quick)
    schemes = ("mrt", "exhaustive-airy", "hierarchical-airy", "exhaustive-focused", "exhaustive-curved")
    powers = evaluate_users(sc, pts[valid], specs, schemes, threads=cfg.threads)
    grids = {}
    for s in schemes:
        g = np.full(pts.shape[0], np.nan)
        g[valid] = powers[s]
        grids[s] = g.reshape(ys.size, xs.size)
    rows = []
    for i, (x, y) in enumerate(pts):
        rows.append((x, y, int(valid[i])) + tuple(grids[s].ravel()[i] for s in schemes))
    out.csv("power_map.csv", ["x_m", "y_m", "valid_flag"] + [f"{s}_power_rel" for s in schemes], rows)
    pairs = {
        "gain_exhaustive_over_hierarchical_airy": ("exhaustive-airy", "hierarchical-airy"),
        "gain_hierarchical_airy_over_focused": ("hierarchical-airy", "exhaustive-focused"),
        "gain_hierarchical_airy_over_curved": ("hierarchical-airy", "exhaustive-curved"),
    }
    for name, (a, b) in pairs.items():
        diff = db(grids[a]) - db(grids[b])
        out.heatmap(f"{name}_db.png", np.nan_to_num(diff, nan=0.0), "gain_db", scale="linear")


def _run_se_vs_power(cfg: ExperimentConfig, out: _Writer):
    sc = cfg.scenario
    users, H = _users_and_channels(cfg)
    specs = codebook_specs(cfg.codebook, cfg.quick)
    powers = evaluate_users(sc, users, specs, cfg.schemes, channels=H, steered=steered_spec(sc, cfg.quick), threads=cfg.threads)
    ratios = [blockage_ratio(sc, u) for u in users]
    out.csv("per_user.csv", CSV_HEADER.split(","), _per_user_rows(cfg, sc, users, powers, ratios))
    levels_db = cfg.sweep.get("power_db", list(range(-10, 31, 5)))
    rows = []
    for p_db in levels_db:
        scale = 10 ** (p_db / 10) / sc.power
        for s in cfg.schemes:
            se = np.log2(1 + powers[s] * scale / sc.noise_power)
            rows.append((p_db, s, se.mean(), se.std(ddof=1) / math.sqrt(se.size) if se.size > 1 else 0.0))
    out.csv("se_vs_power.csv", ["power_db", "scheme", "mean_se_bps_hz", "stderr_bps_hz"], rows)


def _run_blockage_sweep(cfg: ExperimentConfig, out: _Writer):
    sc = cfg.scenario
    users, H = _users_and_channels(cfg)
    specs = codebook_specs(cfg.codebook, cfg.quick)
    powers = evaluate_users(sc, users, specs, cfg.schemes, channels=H, steered=steered_spec(sc, cfg.quick), threads=cfg.threads)
    ratios = np.array([blockage_ratio(sc, u) for u in users])
    out.csv("per_user.csv", CSV_HEADER.split(","), _per_user_rows(cfg, sc, users, powers, ratios))
    edges = cfg.sweep.get("bin_edges", [0.0, 1e-12, 0.2, 0.4, 0.6, 0.8, 1.0 + 1e-12])
    rows = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (ratios >= lo) & (ratios < hi)
        for s in cfg.schemes:
            if sel.any():
                vals = db(powers[s][sel])
                gap = db(powers["mrt"][sel]) - vals if "mrt" in powers else np.full(vals.shape, np.nan)
                rows.append((lo, hi, s, int(sel.sum()), vals.mean(), gap.mean()))
    out.csv("blockage_sweep.csv", ["ratio_lo_frac", "ratio_hi_frac", "scheme", "users_count", "mean_power_db", "mean_gap_to_mrt_db"], rows)


def _scenario_at_frequency(sc: Scenario, freq: float) -> Scenario:
    lam = SPEED_OF_LIGHT / freq
    aperture = sc.geometry.aperture
    n = int(round(aperture / (lam / 2))) + 1
    grid = replace(sc.grid, dx=None, dy=None)
    return validate_scenario(replace(sc, frequency=freq, geometry=ArrayGeometry(n, lam / 2), grid=grid))


def _sweep_scenarios(cfg, out, scenarios: list[tuple[str, float, Scenario]], filename: str, label: str):
    rows = []
    for tag, value, sc in scenarios:
        users, H = _users_and_channels(cfg, sc)
        specs = codebook_specs(cfg.codebook, cfg.quick)
        powers = evaluate_users(sc, users, specs, cfg.schemes, channels=H, steered=steered_spec(sc, cfg.quick), threads=cfg.threads)
        for s in cfg.schemes:
            se = np.log2(1 + powers[s] / sc.noise_power)
            rows.append((value, s, se.mean(), se.std(ddof=1) / math.sqrt(se.size) if se.size > 1 else 0.0, powers["_probes"][s]))
        log.info("%s=%s done", label, value)
    out.csv(filename, [label, "scheme", "mean_se_bps_hz", "stderr_bps_hz", "probes_count"], rows)


def _run_frequency_sweep(cfg: ExperimentConfig, out: _Writer):
    freqs = cfg.sweep.get("frequencies_hz", [30e9, 60e9, 100e9, 140e9])
    scen = [(f"{f:g}", f, _scenario_at_frequency(cfg.scenario, f)) for f in freqs]
    _sweep_scenarios(cfg, out, scen, "frequency_sweep.csv", "frequency_hz")


def _run_obstacle_size_sweep(cfg: ExperimentConfig, out: _Writer):
    sc = cfg.scenario
    if not sc.obstacles:
        raise SpecError("obstacle-size-sweep needs a scenario obstacle to resize")
    base = sc.obstacles[0]
    yc = 0.5 * (base.y_down + base.y_up)
    lengths = cfg.sweep.get("obstacle_lengths_m", [0.1, 0.2, 0.3, 0.4, 0.5])
    scen = []
    for length in lengths:
        ob = Obstacle(base.x_left, base.x_right, yc - length / 2, yc + length / 2)
        scen.append((f"{length:g}", length, sc.with_obstacles((ob,) + sc.obstacles[1:])))
    _sweep_scenarios(cfg, out, scen, "obstacle_size_sweep.csv", "obstacle_length_m")


def _run_codebook_size_sweep(cfg: ExperimentConfig, out: _Writer):
    sc = cfg.scenario
    users, H = _users_and_channels(cfg)
    angles = cfg.sweep.get("n_angles", [10, 30, 50, 70, 90, 110, 130])
    distances = cfg.sweep.get("n_distances", [5, 10, 15, 20, 25, 30, 35])
    schemes = [s for s in cfg.schemes if s != "exhaustive-steered"]
    rows = []
    for axis, values in (("n_angles", angles), ("n_distances", distances)):
        for v in values:
            specs = codebook_specs({**cfg.codebook, axis: int(v)}, cfg.quick)
            powers = evaluate_users(sc, users, specs, schemes, channels=H, threads=cfg.threads)
            for s in schemes:
                se = np.log2(1 + powers[s] / sc.noise_power)
                rows.append((axis, v, s, se.mean(), powers["_probes"][s]))
    out.csv("codebook_size_sweep.csv", ["axis", "samples_count", "scheme", "mean_se_bps_hz", "probes_count"], rows)


def _run_hybrid_gap(cfg: ExperimentConfig, out: _Writer):
    sc = cfg.scenario
    user = tuple(cfg.sweep.get("user", (1.1, 0.17)))
    n_rf_list = cfg.sweep.get("n_rf", list(range(5, 101, 5)))
    bits_list = cfg.sweep.get("bits", [1, 2, 3, 4])
    k_os = int(cfg.sweep.get("oversampling", 4))
    h = channel_matrix(sc, [user], workers=cfg.threads)[0]
    specs = codebook_specs(cfg.codebook, cfg.quick)
    best = exhaustive_search(h, assemble_codebook(sc, "nf-airy", specs))
    ideal = make_beam(sc, best.best_params)
    p_ideal = received_power(h, ideal)
    dictionary = build_dictionary(sc.geometry.num_elements, k_os)
    rows = []
    for bits in bits_list:
        for n_rf in n_rf_list:
            fac = omp_hybrid(ideal, int(n_rf), dictionary, int(bits))
            p = received_power(h, effective_weights(fac))
            rows.append((bits, n_rf, p, db(p_ideal) - db(p), fac.residual_history[-1]))
    out.csv("hybrid_gap.csv", ["bits", "n_rf_count", "hybrid_power_rel", "gap_db", "final_residual_rel"], rows)


def _run_correlation_curves(cfg: ExperimentConfig, out: _Writer):
    sc = cfg.scenario
    y = sc.geometry.y_positions
    specs = codebook_specs(cfg.codebook, cfg.quick)
    s0 = float(cfg.sweep.get("s0", -0.1))
    a0 = float(cfg.sweep.get("a0", -1.0))
    a_grid = sample_axis(specs["decay"])
    rows = []
    for i, ai in enumerate(a_grid):
        for aj in a_grid[i:]:
            c = codeword_correlation(airy_envelope(y, s0, ai), airy_envelope(y, s0, aj))
            rows.append(("decay", ai, aj, abs(aj - ai), c))
    sp = specs["scale"]
    recip = sample_axis(replace(sp, symmetric=False))
    uniform = np.linspace(sp.high, sp.low, sp.count)
    for label, grid in (("scale_reciprocal", recip), ("scale_uniform", uniform)):
        for i in range(grid.size):
            for j in range(i, grid.size):
                c = codeword_correlation(airy_envelope(y, grid[i], a0), airy_envelope(y, grid[j], a0))
                rows.append((label, grid[i], grid[j], abs(grid[j] - grid[i]), c))
    out.csv("correlation_curves.csv", ["axis", "value_i_si", "value_j_si", "interval_si", "correlation_rel"], rows)


_RUNNERS: dict[str, Callable] = {
    "beam-pattern": _run_beam_pattern,
    "power-map": _run_power_map,
    "se-vs-power": _run_se_vs_power,
    "blockage-sweep": _run_blockage_sweep,
    "frequency-sweep": _run_frequency_sweep,
    "codebook-size-sweep": _run_codebook_size_sweep,
    "obstacle-size-sweep": _run_obstacle_size_sweep,
    "hybrid-gap": _run_hybrid_gap,
    "correlation-curves": _run_correlation_curves,
}


def run_experiment(cfg: ExperimentConfig) -> RunManifest:
    """Run one experiment and write its files plus ``manifest.json`` into ``cfg.output_dir``.

    On failure every file written so far is removed and an
    :class:`ExperimentError` carrying the run context is raised.
    """
    root = Path(cfg.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    out = _Writer(root)
    try:
        _RUNNERS[cfg.kind](cfg, out)
        files = [
            {"path": p.name, "sha256": _sha256(p), "bytes": p.stat().st_size}
            for p in sorted(set(out.files), key=lambda p: p.name)
        ]
        manifest = RunManifest(cfg.config_hash(), __version__, files)
        out.path("manifest.json").write_text(manifest.to_json() + "\n")
        return manifest
    except Exception as exc:
        out.cleanup()
        (root / "manifest.json").unlink(missing_ok=True)
        raise ExperimentError(
            f"{cfg.kind} experiment failed: {exc}",
            {"kind": cfg.kind, "seed": cfg.rng_seed, "error_type": type(exc).__name__},
        ) from exc
