"""Hybrid analog/digital factorization of a beam by orthogonal matching pursuit.

The analog precoder is built from oversampled DFT steering atoms, its phases
are then quantized to B bits, and the digital precoder is refit by least
squares against the quantized matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import json
import math
from pathlib import Path

import numpy as np

from .errors import RankError, SpecError
from .scenario import Weights

__all__ = [
    "SteeringDictionary",
    "HybridFactorization",
    "build_dictionary",
    "phase_table",
    "quantize_phases",
    "omp_hybrid",
    "effective_weights",
]

_REG = 1e-10


@dataclass(frozen=True)
class SteeringDictionary:
    atoms: np.ndarray  # N x L
    psi: np.ndarray
    oversampling: int

    @property
    def size(self) -> int:
        return self.atoms.shape[1]


@dataclass
class HybridFactorization:
    analog: np.ndarray  # N x N_RF, quantized
    digital: np.ndarray  # N_RF
    indices: list[int]
    residual_history: np.ndarray
    bits: int
    phase_codes: np.ndarray  # N x N_RF integers k, phase = 2 pi k / 2^B
    power: float
    unquantized_analog: np.ndarray = field(repr=False, default=None)
    unquantized_digital: np.ndarray = field(repr=False, default=None)
    regularized: bool = False

    def to_json(self) -> str:
        return json.dumps(
            {
                "bits": self.bits,
                "power": self.power,
                "indices": [int(i) for i in self.indices],
                "phase_codes": self.phase_codes.astype(int).tolist(),
                "digital_re": self.digital.real.tolist(),
                "digital_im": self.digital.imag.tolist(),
                "residual_history": self.residual_history.tolist(),
                "regularized": self.regularized,
            }
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "HybridFactorization":
        d = json.loads(text)
        codes = np.array(d["phase_codes"], dtype=int)
        analog = phase_table(d["bits"], codes.shape[0], codes)
        return cls(
            analog=analog,
            digital=np.array(d["digital_re"]) + 1j * np.array(d["digital_im"]),
            indices=list(d["indices"]),
            residual_history=np.array(d["residual_history"]),
            bits=d["bits"],
            phase_codes=codes,
            power=d["power"],
            regularized=d["regularized"],
        )


def build_dictionary(n: int, oversampling: int) -> SteeringDictionary:
    """Oversampled DFT dictionary: L = K_os * N atoms on a uniform psi grid in [-1, 1)."""
    if n < 2 or oversampling < 1:
        raise SpecError("need N >= 2 and K_os >= 1")
    size = oversampling * n
    # uniform grid with spacing 2/L; -1 and +1 are the same atom, so keep only -1
    psi = -1 + 2 * np.arange(size) / size
    atoms = np.exp(1j * math.pi * np.outer(np.arange(n), psi)) / math.sqrt(n)
    atoms.setflags(write=False)
    return SteeringDictionary(atoms, psi, oversampling)


def phase_table(bits: int, n: int, codes=None) -> np.ndarray:
    """Constant-modulus entries ``exp(j 2 pi k / 2^B) / sqrt(N)``.

    With ``codes`` given, returns the entries for those codes (same shape)
    without building the full 2^B table.
    """
    levels = 2**bits
    if codes is None:
        return np.exp(2j * math.pi * np.arange(levels) / levels) / math.sqrt(n)
    codes = np.asarray(codes)
    uniq, inv = np.unique(codes, return_inverse=True)
    table = np.exp(2j * math.pi * uniq / levels) / math.sqrt(n)
    return table[inv].reshape(codes.shape)


def quantize_phases(phases: np.ndarray, bits: int) -> np.ndarray:
    """Nearest level index k of 2 pi k / 2^B; exact ties go to the smaller angle."""
    levels = 2**bits
    q = np.mod(phases, 2 * math.pi) / (2 * math.pi / levels)
    return np.mod(np.ceil(q - 0.5), levels).astype(int)


def _least_squares(mat: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, bool]:
    gram = mat.conj().T @ mat
    rhs = mat.conj().T @ target
    if np.linalg.cond(gram) < 1e12:
        return np.linalg.solve(gram, rhs), False
    reg = _REG * np.trace(gram).real / gram.shape[0]
    try:
        sol = np.linalg.solve(gram + reg * np.eye(gram.shape[0]), rhs)
    except np.linalg.LinAlgError as exc:
        raise RankError("regularized refit failed") from exc
    if not np.all(np.isfinite(sol)):
        raise RankError("regularized refit produced non-finite coefficients")
    return sol, True


def omp_hybrid(w, n_rf: int, dictionary: SteeringDictionary, bits: int) -> HybridFactorization:
    target = np.asarray(getattr(w, "w", w), dtype=complex)
    power = float(getattr(w, "power", np.vdot(target, target).real))
    if n_rf < 1 or bits < 1:
        raise SpecError("need N_RF >= 1 and B >= 1")
    atoms = dictionary.atoms
    n = atoms.shape[0]
    if target.size != n:
        raise SpecError("beam length does not match the dictionary")

    residual = target.copy()
    chosen: list[int] = []
    history = [float(np.linalg.norm(residual))]
    regularized = False
    digital = np.zeros(0, dtype=complex)
    for _ in range(n_rf):
        corr = np.abs(atoms.conj().T @ residual)
        if chosen:
            corr[chosen] = -1.0
        chosen.append(int(np.argmax(corr)))
        analog = atoms[:, chosen]
        digital, reg = _least_squares(analog, target)
        regularized |= reg
        residual = target - analog @ digital
        history.append(float(np.linalg.norm(residual)))

    analog = atoms[:, chosen]
    codes = quantize_phases(np.angle(analog), bits)
    analog_q = phase_table(bits, n, codes)
    digital_q, reg = _least_squares(analog_q, target)
    regularized |= reg
    eff = analog_q @ digital_q
    norm = np.linalg.norm(eff)
    if norm > 0:
        digital_q = digital_q * (math.sqrt(power) / norm)
    return HybridFactorization(
        analog=analog_q,
        digital=digital_q,
        indices=chosen,
        residual_history=np.array(history),
        bits=bits,
        phase_codes=codes,
        power=power,
        unquantized_analog=analog,
        unquantized_digital=digital,
        regularized=regularized,
    )


def effective_weights(f: HybridFactorization) -> Weights:
    return Weights.normalized(f.analog @ f.digital, f.power)
