"""
Saturable Battery Simulator - Battery Model

Truncated Fock-space operators, the bare battery Hamiltonian h_B, the drive-frame
Hamiltonian H and closed-form level tables for the saturable and Kerr batteries.

All operators are diagonal in the number basis except for the drive term, so the
saturable fraction χ b†b / (1 + n_s b†b) is evaluated entrywise on occupation numbers.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.errors import DimensionTooSmall
from core.linalg import ComplexMatrix, RealVector

logger = logging.getLogger(__name__)


class ModelParams(BaseModel):
    """Physical parameters of one battery (ħ = 1) plus the Fock truncation.

    Only omega and detuning are stored; the drive frequency is derived so that
    detuning = omega − drive_freq holds identically.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    omega: float = 1.0
    detuning: float = 0.1
    chi: float = 1.0
    n_s: float = Field(default=0.0, ge=0.0)
    alpha: float = 0.5
    gamma: float = Field(default=0.2, ge=0.0)
    dim: int = Field(default=40, ge=2)
    nonlinearity: Literal["saturable", "kerr"] = "saturable"

    @property
    def drive_freq(self) -> float:
        return self.omega - self.detuning

    def with_updates(self, **changes) -> "ModelParams":
        """Validated copy with some fields replaced."""
        return ModelParams.model_validate({**self.model_dump(), **changes})


@dataclass(frozen=True)
class SpectrumTable:
    """Level energies E_n for n = 0..N−1, optionally with the Kerr expansion alongside."""
    n: np.ndarray
    energies: RealVector
    kerr_energies: Optional[RealVector] = None

    def levels_below(self, e_star: float) -> int:
        return int(np.count_nonzero(self.energies <= e_star))


def annihilation(dim: int) -> ComplexMatrix:
    """Ladder operator b with ⟨n−1|b|n⟩ = √n."""
    if dim < 2:
        raise DimensionTooSmall(f"Fock truncation must be at least 2, got {dim}")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(np.complex128)


def number_operator(dim: int) -> ComplexMatrix:
    if dim < 2:
        raise DimensionTooSmall(f"Fock truncation must be at least 2, got {dim}")
    return np.diag(np.arange(dim, dtype=float)).astype(np.complex128)


def nonlinear_shift(n, p: ModelParams) -> RealVector:
    """Spectral shift added to the linear ladder: χn/(1 + n_s n), or its Kerr expansion χn − n_sχn²."""
    n = np.asarray(n, dtype=float)
    if p.nonlinearity == "kerr":
        return p.chi * n - p.n_s * p.chi * n**2
    return p.chi * n / (1.0 + p.n_s * n)


def level_energies(n, p: ModelParams) -> RealVector:
    """E_n = ωn + χn/(1 + n n_s)."""
    n = np.asarray(n, dtype=float)
    return p.omega * n + nonlinear_shift(n, p)


def kerr_energies(n, p: ModelParams) -> RealVector:
    """Second-order expansion of the saturable spectrum, (ω + χ)n − n_sχn²."""
    n = np.asarray(n, dtype=float)
    return (p.omega + p.chi) * n - p.n_s * p.chi * n**2


def battery_hamiltonian(p: ModelParams) -> ComplexMatrix:
    """Bare battery Hamiltonian h_B, diagonal in the number basis."""
    if p.dim < 2:
        raise DimensionTooSmall(f"Fock truncation must be at least 2, got {p.dim}")
    energies = level_energies(np.arange(p.dim), p)
    if p.nonlinearity == "kerr" and np.any(energies < 0):
        logger.warning(
            f"Kerr levels turn negative within the truncation (min {energies.min():.3f}); "
            f"the expansion is outside its range of validity"
        )
    return np.diag(energies).astype(np.complex128)


def rotating_hamiltonian(p: ModelParams) -> ComplexMatrix:
    """Hamiltonian in the frame rotating at the drive frequency.

    H = Δ b†b + χ b†b/(1 + n_s b†b) + α(b + b†)
    """
    n = np.arange(p.dim)
    b = annihilation(p.dim)
    diagonal = p.detuning * n + nonlinear_shift(n, p)
    return np.diag(diagonal).astype(np.complex128) + p.alpha * (b + b.conj().T)


def spectrum_table(p: ModelParams, include_kerr: bool = False) -> SpectrumTable:
    n = np.arange(p.dim)
    return SpectrumTable(
        n=n,
        energies=level_energies(n, p),
        kerr_energies=kerr_energies(n, p) if include_kerr else None,
    )
