"""
Saturable Battery Simulator - Observables

Energy, ergotropy (through the passive state) and the Wigner function of a battery
state. Energies are always measured with the bare battery Hamiltonian h_B, never with
the drive-frame Hamiltonian.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from core.errors import DimensionMismatch, TruncationInsufficient
from core.linalg import ComplexMatrix, RealVector, hermitian_eig
from core.model import annihilation
from core.states import DensityMatrix

logger = logging.getLogger(__name__)

CLIP_TOL = 1e-8
IMAG_TOL = 1e-10
WIGNER_TAIL_TOL = 1e-8


@dataclass(frozen=True)
class PassiveDecomposition:
    """State eigenvalues (descending) paired with h_B levels (ascending)."""
    probs: RealVector
    levels: RealVector
    passive_energy: float
    basis: ComplexMatrix  # h_B eigenvectors as columns, in the order of `levels`


@dataclass(frozen=True)
class WignerGrid:
    """W(β) sampled on a Cartesian grid; values[i, j] = W(re_beta[i] + i·im_beta[j])."""
    re_beta: RealVector
    im_beta: RealVector
    values: np.ndarray
    padded_dim: int = 0

    @property
    def cell_area(self) -> float:
        d_re = self.re_beta[1] - self.re_beta[0] if self.re_beta.size > 1 else 1.0
        d_im = self.im_beta[1] - self.im_beta[0] if self.im_beta.size > 1 else 1.0
        return float(d_re * d_im)

    @property
    def normalization(self) -> float:
        return float(self.values.sum() * self.cell_area)

    @property
    def min_value(self) -> float:
        return float(self.values.min())

    @property
    def negative_volume(self) -> float:
        """Integrated |W| over the region where W < 0."""
        return float(-self.values[self.values < 0].sum() * self.cell_area)


@dataclass(frozen=True)
class WignerGridSpec:
    extent: float = 4.0
    points: int = 101

    def axes(self) -> Tuple[RealVector, RealVector]:
        axis = np.linspace(-self.extent, self.extent, self.points)
        return axis, axis.copy()


def _check_dims(rho: DensityMatrix, op: ComplexMatrix) -> None:
    if op.shape != rho.mat.shape:
        raise DimensionMismatch(f"Operator shape {op.shape} does not match state shape {rho.mat.shape}")


def energy(rho: DensityMatrix, hB: ComplexMatrix) -> float:
    """E = tr[h_B ρ]."""
    _check_dims(rho, hB)
    value = np.einsum("ij,ji->", hB, rho.mat)
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value.real)):
        logger.warning(f"Energy has an imaginary residue {value.imag:.3e}")
    return float(value.real)


def ergotropy(rho: DensityMatrix, hB: ComplexMatrix) -> Tuple[float, PassiveDecomposition]:
    """Ergotropy tr[h_B ρ] − tr[h_B σ] with σ the passive state of ρ.

    Eigenvalues of ρ above −CLIP_TOL are clipped to zero and the spectrum renormalized
    before pairing; the stored state is never modified.
    """
    _check_dims(rho, hB)
    probs = rho.eigenvalues.copy()
    if probs[0] < -CLIP_TOL:
        logger.warning(f"State eigenvalue {probs[0]:.3e} below clipping tolerance {CLIP_TOL:.0e}")
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    # stable sort keeps degenerate eigenvalues in input order; the pairing sum is unaffected
    probs = probs[np.argsort(-probs, kind="stable")]

    levels = hermitian_eig(hB)
    passive_energy = float(np.dot(probs, levels.eigenvalues))
    decomposition = PassiveDecomposition(
        probs=probs,
        levels=levels.eigenvalues,
        passive_energy=passive_energy,
        basis=levels.eigenvectors,
    )
    return energy(rho, hB) - passive_energy, decomposition


def passive_state(decomposition: PassiveDecomposition) -> ComplexMatrix:
    """σ = Σ_n p_n |E_n⟩⟨E_n|, which commutes with h_B by construction."""
    v = decomposition.basis
    return (v * decomposition.probs[None, :]) @ v.conj().T


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """½‖ρ − σ‖₁."""
    if rho.mat.shape != sigma.mat.shape:
        raise DimensionMismatch(f"State shapes differ: {rho.mat.shape} vs {sigma.mat.shape}")
    delta = rho.mat - sigma.mat
    return 0.5 * float(np.abs(np.linalg.eigvalsh(0.5 * (delta + delta.conj().T))).sum())


def padded_dimension(dim: int, max_radius: float) -> int:
    """Fock dimension large enough to hold any retained level displaced by max_radius."""
    return max(dim, int(math.ceil((math.sqrt(dim) + max_radius + 3.0) ** 2)))


def wigner(
    rho: DensityMatrix,
    grid: Optional[WignerGridSpec] = None,
    re_beta: Optional[RealVector] = None,
    im_beta: Optional[RealVector] = None,
    tail_tol: float = WIGNER_TAIL_TOL,
) -> WignerGrid:
    """Wigner function from the displaced parity, W(β) = (2/π) tr[Π D(β)† ρ D(β)].

    D(β) = R(θ) exp(−i r P) R(θ)† with β = r e^{iθ}, P = i(b† − b) and R(θ) = diag(e^{inθ}).
    P is diagonalized once in a padded Fock space, so every grid point only needs phase
    factors and products with the N retained rows. Propagators for equal radii are reused.
    """
    if re_beta is None or im_beta is None:
        re_beta, im_beta = (grid or WignerGridSpec()).axes()
    re_beta = np.asarray(re_beta, dtype=float)
    im_beta = np.asarray(im_beta, dtype=float)
    if not (np.all(np.isfinite(re_beta)) and np.all(np.isfinite(im_beta))):
        raise ValueError("Wigner grid must be finite")

    n_keep = rho.dim
    tail = rho.population(n_keep - 1)
    if tail > tail_tol:
        raise TruncationInsufficient(tail, n_keep, tail_tol)

    max_radius = float(np.hypot(np.abs(re_beta).max(), np.abs(im_beta).max()))
    m = padded_dimension(n_keep, max_radius)
    b = annihilation(m)
    quadrature = hermitian_eig(1j * (b.conj().T - b))
    x = quadrature.eigenvalues
    v = quadrature.eigenvectors
    v_keep = v[:n_keep, :]
    parity = (-1.0) ** np.arange(m)
    logger.debug(f"Wigner: retained dim {n_keep}, padded dim {m}, {re_beta.size}×{im_beta.size} grid")

    rows_by_radius: Dict[float, ComplexMatrix] = {}
    n = np.arange(n_keep)
    values = np.empty((re_beta.size, im_beta.size))
    for i, xr in enumerate(re_beta):
        for j, yi in enumerate(im_beta):
            r = math.hypot(xr, yi)
            key = round(r, 12)
            k_rows = rows_by_radius.get(key)
            if k_rows is None:
                # rows 0..N−1 of exp(−i r P)
                k_rows = (v_keep * np.exp(-1j * r * x)[None, :]) @ v.conj().T
                rows_by_radius[key] = k_rows
            phase = np.exp(1j * math.atan2(yi, xr) * n)
            rho_rot = phase.conj()[:, None] * rho.mat * phase[None, :]
            # diagonal of K† ρ_θ K; the outer phases of D cancel on the diagonal
            diag = np.einsum("mk,mk->k", k_rows.conj(), rho_rot @ k_rows)
            w = np.dot(parity, diag)
            if abs(w.imag) > IMAG_TOL:
                logger.warning(f"Wigner value at β={xr:+.3f}{yi:+.3f}i has imaginary part {w.imag:.3e}")
            values[i, j] = (2.0 / math.pi) * w.real

    return WignerGrid(re_beta=re_beta, im_beta=im_beta, values=values, padded_dim=m)
