"""
Saturable Battery Simulator - Liouvillian Spectrum and Steady States

Spectral decomposition 𝓛ρ_n = λ_nρ_n, 𝓛†r_n = λ_n* r_n, the steady state attached to
λ_0 = 0, and the maximum stored energy along a charging run.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Literal, NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from core import linalg
from core.errors import ConvergenceFailure, DegenerateSteadyState, InvalidTimeGrid, NoRelaxation, SingularMatrix
from core.dynamics import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    Integrator,
    Liouvillian,
    apply_lindbladian,
    build_liouvillian,
    propagate,
    unvec,
    vec,
)
from core.linalg import ComplexMatrix, ComplexVector
from core.model import ModelParams, battery_hamiltonian
from core.observables import energy, ergotropy
from core.states import DensityMatrix

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-8
RESIDUAL_RTOL = 1e-10
TIE_TOL = 1e-10


@dataclass(frozen=True)
class LiouvillianSpectrum:
    """Eigenvalues ordered by ascending |Re λ| (ties by ascending |Im λ|).

    left_ops are normalized so that tr[r_n ρ_m] = δ_nm for the retained modes.
    """
    eigenvalues: ComplexVector
    right_ops: List[ComplexMatrix] = field(repr=False)
    left_ops: List[ComplexMatrix] = field(repr=False)
    spectral_gap: float

    def __len__(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class SteadyStateResult:
    rho_ss: DensityMatrix
    energy_ss: float
    ergotropy_ss: float
    residual: float
    spectral_gap: float
    method: str


class MaxEnergyResult(NamedTuple):
    tau_star: float
    energy_max: float
    at_boundary: bool


def _spectral_order(eigenvalues: ComplexVector) -> np.ndarray:
    """Non-strict ordering by |Re λ|.

    Sorted |Re λ| values whose successive gaps are below TIE_TOL form one run, and a
    run is ordered by |Im λ|.
    """
    re = np.abs(eigenvalues.real)
    by_re = np.argsort(re, kind="stable")
    runs = np.empty(re.size, dtype=int)
    runs[by_re] = np.concatenate(([0], np.cumsum(np.diff(re[by_re]) >= TIE_TOL)))
    return np.lexsort((np.abs(eigenvalues.imag), runs))


def liouvillian_spectrum(L: Liouvillian, k: Optional[int] = None) -> LiouvillianSpectrum:
    """The k eigenvalues smallest in |Re λ| with their right and left eigen-operators."""
    size = L.dim**2
    k = size if k is None else k
    if not 1 <= k <= size:
        raise ValueError(f"k must lie in [1, {size}], got {k}")

    decomposition = linalg.general_eig(L.sup, left=True)
    order = _spectral_order(decomposition.eigenvalues)[:k]
    eigenvalues = decomposition.eigenvalues[order]

    if abs(eigenvalues[0]) > ZERO_TOL:
        raise ConvergenceFailure(
            f"Smallest eigenvalue {eigenvalues[0]:.3e} is not zero; the Liouvillian spectrum is unreliable"
        )
    if np.any(eigenvalues.real > ZERO_TOL):
        logger.warning(f"Eigenvalues with positive real part up to {eigenvalues.real.max():.3e}")

    right_ops, left_ops = [], []
    for idx in order:
        v = decomposition.right_vectors[:, idx]
        w = decomposition.left_vectors[:, idx]
        overlap = np.vdot(w, v)
        if abs(overlap) < 1e-12:
            logger.warning(f"Defective mode at λ={decomposition.eigenvalues[idx]:.4g}; left operator left unnormalized")
            overlap = 1.0
        right_ops.append(unvec(v, L.dim))
        # tr[r ρ] = w^H vec(ρ) / (w^H v)
        left_ops.append(unvec(w, L.dim).conj().T / overlap)

    trace0 = np.trace(right_ops[0])
    if abs(trace0) > 1e-14:
        left_ops[0] = left_ops[0] * trace0
        right_ops[0] = right_ops[0] / trace0

    gap = float(abs(eigenvalues[1].real)) if k > 1 else math.nan
    logger.debug(f"Liouvillian spectrum: {k} modes, gap {gap:.4g}")
    return LiouvillianSpectrum(eigenvalues=eigenvalues, right_ops=right_ops,
                               left_ops=left_ops, spectral_gap=gap)


def mode_amplitudes(spectrum: LiouvillianSpectrum, rho0: DensityMatrix, tau: float) -> ComplexVector:
    """c_n(τ) = exp(λ_nτ) tr[r_n ρ(0)]."""
    overlaps = np.array([np.einsum("ij,ji->", r, rho0.mat) for r in spectrum.left_ops])
    return np.exp(spectrum.eigenvalues * tau) * overlaps


def spectral_propagate(spectrum: LiouvillianSpectrum, rho0: DensityMatrix, tau: float) -> ComplexMatrix:
    """ρ(τ) = Σ_n c_n(τ) ρ_n; exact only for a complete spectrum of a diagonalizable 𝓛."""
    amplitudes = mode_amplitudes(spectrum, rho0, tau)
    return np.tensordot(amplitudes, np.array(spectrum.right_ops), axes=1)


def _bordered_solution(L: Liouvillian) -> ComplexMatrix:
    """Solve 𝓛x = 0 with tr x = 1 by replacing the first equation with the trace row."""
    n = L.dim
    system = L.sup.copy()
    system[0, :] = vec(np.eye(n))
    rhs = np.zeros(n * n, dtype=np.complex128)
    rhs[0] = 1.0
    try:
        x = linalg.solve(system, rhs)
    except SingularMatrix as exc:
        raise DegenerateSteadyState(f"Bordered steady-state system is singular: {exc}") from exc
    return unvec(x, n)


def _eig_solution(L: Liouvillian) -> tuple:
    decomposition = linalg.general_eig(L.sup)
    order = _spectral_order(decomposition.eigenvalues)
    eigenvalues = decomposition.eigenvalues[order]
    near_zero = int(np.count_nonzero(np.abs(eigenvalues) <= ZERO_TOL))
    gap = float(abs(eigenvalues[1].real))
    if near_zero > 1 or gap <= ZERO_TOL:
        raise DegenerateSteadyState(
            f"{near_zero} eigenvalues within {ZERO_TOL:.0e} of zero (gap {gap:.3e}); steady state is not unique"
        )
    return unvec(decomposition.right_vectors[:, order[0]], L.dim), gap


def steady_state(L: Liouvillian, method: Literal["eig", "bordered"] = "eig") -> SteadyStateResult:
    """Unique steady state ρ_ss = ρ_0 / tr ρ_0 with its energy and ergotropy."""
    if L.gamma == 0:
        raise NoRelaxation("γ = 0: the dynamics is unitary and does not relax to a steady state")

    if method == "eig":
        raw, gap = _eig_solution(L)
    elif method == "bordered":
        raw, gap = _bordered_solution(L), math.nan
    else:
        raise ValueError(f"Unknown steady-state method: {method}")

    mat = raw / np.trace(raw)
    rho_ss = DensityMatrix(linalg.hermitize(mat))
    residual = linalg.frobenius(apply_lindbladian(L, rho_ss))
    bound = RESIDUAL_RTOL * linalg.frobenius(L.sup)
    if residual > bound:
        logger.warning(f"Steady-state residual {residual:.3e} exceeds {bound:.3e}")

    hB = battery_hamiltonian(L.params)
    erg, _ = ergotropy(rho_ss, hB)
    return SteadyStateResult(
        rho_ss=rho_ss,
        energy_ss=energy(rho_ss, hB),
        ergotropy_ss=erg,
        residual=residual,
        spectral_gap=gap,
        method=method,
    )


def max_energy(
    p: ModelParams,
    tau_max: float,
    coarse_count: int = 2001,
    refine_step: float = 1e-3,
    rho0: Optional[DensityMatrix] = None,
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    method: Integrator = "rk45",
) -> MaxEnergyResult:
    """Maximum of E(τ) over [0, tau_max].

    Coarse scan first; an interior maximum is then re-propagated on a grid no coarser
    than refine_step around the best coarse point and located by golden-section search
    on a cubic interpolant.
    """
    if tau_max <= 0:
        raise InvalidTimeGrid(f"tau_max must be positive, got {tau_max}")
    if coarse_count < 2:
        raise InvalidTimeGrid(f"coarse scan needs at least 2 points, got {coarse_count}")
    L = build_liouvillian(p)
    hB = battery_hamiltonian(p)
    if rho0 is None:
        rho0 = DensityMatrix.ground(p.dim)

    coarse = np.linspace(0.0, tau_max, coarse_count)
    states = propagate(L, rho0, coarse, tol=tol, atol=atol, method=method)
    energies = np.array([energy(s, hB) for s in states])
    k = int(np.argmax(energies))
    if k == 0 or k == coarse.size - 1:
        return MaxEnergyResult(float(coarse[k]), float(energies[k]), True)

    start, stop = coarse[k - 1], coarse[k + 1]
    count = max(5, int(math.ceil((stop - start) / refine_step)) + 1)
    offsets = np.linspace(0.0, stop - start, count)
    fine_states = propagate(L, states[k - 1], offsets, tol=tol, atol=atol, method=method)
    fine_times = start + offsets
    fine_energies = np.array([energy(s, hB) for s in fine_states])

    j = int(np.argmax(fine_energies))
    if j == 0 or j == count - 1:
        return MaxEnergyResult(float(fine_times[j]), float(fine_energies[j]), False)

    spline = CubicSpline(fine_times, fine_energies)
    tau_star, peak = float(fine_times[j]), float(fine_energies[j])
    try:
        found = minimize_scalar(lambda t: -spline(t), method="golden",
                                bracket=(fine_times[j - 1], fine_times[j], fine_times[j + 1]))
    except ValueError:
        # flat top: the grid node is already the answer
        return MaxEnergyResult(tau_star, peak, False)
    if fine_times[j - 1] <= found.x <= fine_times[j + 1] and float(spline(found.x)) >= peak:
        tau_star, peak = float(found.x), float(spline(found.x))
    return MaxEnergyResult(tau_star, peak, False)
