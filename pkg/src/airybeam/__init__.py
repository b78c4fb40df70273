"""Near-field beamforming in obstructed scenes: propagation, waveforms, codebooks, training."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .scenario import (
    ArrayGeometry,
    GridConfig,
    Obstacle,
    Scenario,
    Weights,
    blockage_mask,
    load_scenario,
    validate_scenario,
)
from .special import airy_ai, airy_envelope
from .propagation import (
    aperture_plane,
    asm_step,
    channel_matrix,
    equivalent_channel,
    field_at,
    propagate,
    rs_reference,
)
from .waveforms import BeamParams, make_beam, mrt_beam
from .codebooks import SamplingSpec, assemble_codebook, codeword_correlation, sample_axis
from .hybrid import build_dictionary, effective_weights, omp_hybrid
from .training import (
    blockage_ratio,
    exhaustive_search,
    hierarchical_airy_search,
    hierarchical_curved_search,
    received_power,
    spectral_efficiency,
)
