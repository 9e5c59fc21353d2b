"""
Saturable Battery Simulator - Lindblad Dynamics

Builds the Lindbladian

    𝓛ρ = −i[H, ρ] + γ (b ρ b† − ½{b†b, ρ})

with H the drive-frame Hamiltonian, propagates states in time and evaluates the
short-time Taylor terms 𝓛ⁿρ(0).

Vectorization convention (used by every superoperator in the package): column
stacking, vec(ρ)[i + jN] = ρ[i, j], so that vec(AXB) = (Bᵀ ⊗ A) vec(X).
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from core import linalg
from core.errors import DimensionMismatch, InvalidTimeGrid, InvariantViolation, StepSizeUnderflow
from core.linalg import ComplexMatrix, ComplexVector
from core.model import ModelParams, annihilation, number_operator, rotating_hamiltonian
from core.observables import energy, ergotropy
from core.states import PSD_TOL, DensityMatrix

logger = logging.getLogger(__name__)

Integrator = Literal["rk45", "expm"]

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
RENORMALIZE_THRESHOLD = 1e-12
TRACE_DRIFT_LIMIT = 1e-6


def vec(mat: ComplexMatrix) -> ComplexVector:
    return np.asarray(mat).reshape(-1, order="F")


def unvec(v: ComplexVector, dim: Optional[int] = None) -> ComplexMatrix:
    if dim is None:
        dim = int(round(math.sqrt(v.shape[0])))
    return np.asarray(v).reshape(dim, dim, order="F")


@dataclass(frozen=True)
class Liouvillian:
    """Lindbladian of one parameter point.

    The N²×N² superoperator matrix is built on first access; time propagation uses the
    N×N matrix form and never needs it.
    """
    params: ModelParams
    hamiltonian: ComplexMatrix = field(repr=False)
    jump: ComplexMatrix = field(repr=False)

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def dim(self) -> int:
        return self.params.dim

    @cached_property
    def number(self) -> ComplexMatrix:
        return number_operator(self.dim)

    @cached_property
    def sup(self) -> ComplexMatrix:
        n = self.dim
        identity = np.eye(n, dtype=np.complex128)
        h, b, nb, g = self.hamiltonian, self.jump, self.number, self.gamma
        # left action: −iHρ − ½γ b†bρ ; right action: +iρH − ½γ ρb†b
        left = -1j * h - 0.5 * g * nb
        right = 1j * h.T - 0.5 * g * nb.T
        sup = np.kron(identity, left)
        sup += np.kron(right, identity)
        if g:
            sup += g * np.kron(b.conj(), b)
        return sup

    def action(self, rho: ComplexMatrix) -> ComplexMatrix:
        """𝓛ρ in matrix form."""
        h, b, nb, g = self.hamiltonian, self.jump, self.number, self.gamma
        out = -1j * (h @ rho - rho @ h)
        if g:
            out += g * (b @ rho @ b.conj().T - 0.5 * (nb @ rho + rho @ nb))
        return out


@dataclass(frozen=True)
class TrajectoryRecord:
    """Energy and ergotropy along one charging run, with per-step state diagnostics."""
    times: np.ndarray
    energy: np.ndarray
    ergotropy: np.ndarray
    trace_err: np.ndarray
    min_eig: np.ndarray
    purity: np.ndarray

    def __post_init__(self):
        lengths = {len(a) for a in (self.times, self.energy, self.ergotropy,
                                    self.trace_err, self.min_eig, self.purity)}
        if len(lengths) != 1:
            raise DimensionMismatch(f"Trajectory columns have different lengths: {sorted(lengths)}")

    def __len__(self) -> int:
        return len(self.times)

    def argmax(self) -> Tuple[float, float]:
        k = int(np.argmax(self.energy))
        return float(self.times[k]), float(self.energy[k])

    def has_interior_maximum(self) -> bool:
        k = int(np.argmax(self.energy))
        return 0 < k < len(self.times) - 1

    def max_average_power(self) -> Tuple[float, float]:
        """Largest average charging power E(τ)/τ over τ > 0, with its time."""
        mask = self.times > 0
        if not np.any(mask):
            return 0.0, 0.0
        power = self.energy[mask] / self.times[mask]
        k = int(np.argmax(power))
        return float(self.times[mask][k]), float(power[k])


def build_liouvillian(p: ModelParams) -> Liouvillian:
    return Liouvillian(params=p, hamiltonian=rotating_hamiltonian(p), jump=annihilation(p.dim))


def _as_array(L: Liouvillian, rho: Union[DensityMatrix, ComplexMatrix]) -> ComplexMatrix:
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    if mat.shape != (L.dim, L.dim):
        raise DimensionMismatch(f"State shape {mat.shape} does not match Liouvillian dim {L.dim}")
    return mat


def apply_lindbladian(L: Liouvillian, rho: Union[DensityMatrix, ComplexMatrix]) -> ComplexMatrix:
    """dρ/dt = 𝓛ρ, evaluated in N×N matrix form."""
    return L.action(_as_array(L, rho))


def apply_superoperator(L: Liouvillian, rho: Union[DensityMatrix, ComplexMatrix]) -> ComplexMatrix:
    """𝓛ρ through the vectorized superoperator; an independent path to apply_lindbladian."""
    return unvec(L.sup @ vec(_as_array(L, rho)), L.dim)


def check_time_grid(tau_grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray(tau_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidTimeGrid("Time grid must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(grid)) or grid[0] < 0:
        raise InvalidTimeGrid("Time grid must be finite and start at τ ≥ 0")
    if np.any(np.diff(grid) <= 0):
        raise InvalidTimeGrid("Time grid must be strictly increasing")
    return grid


def _evolve_rk45(L: Liouvillian, rho0: ComplexMatrix, grid: np.ndarray,
                 rtol: float, atol: float) -> List[ComplexMatrix]:
    n = L.dim

    def rhs(_t, y):
        return L.action(y.reshape(n, n)).ravel()

    sol = solve_ivp(rhs, (0.0, float(grid[-1])), rho0.ravel(), method="RK45",
                    t_eval=grid, rtol=rtol, atol=atol)
    if sol.status < 0:
        raise StepSizeUnderflow(f"Integrator failed at τ={sol.t[-1] if sol.t.size else 0.0:.6g}: {sol.message}")
    logger.debug(f"RK45: {sol.nfev} right-hand-side evaluations for {grid.size} output times")
    return [sol.y[:, k].reshape(n, n) for k in range(grid.size)]


def _evolve_expm(L: Liouvillian, rho0: ComplexMatrix, grid: np.ndarray) -> List[ComplexMatrix]:
    """Exact propagation with exp(Δτ 𝓛), one dense propagator per distinct step length."""
    propagators: Dict[float, ComplexMatrix] = {}
    out = []
    state = vec(rho0)
    previous = 0.0
    for tau in grid:
        step = float(tau - previous)
        if step > 0:
            key = round(step, 12)
            prop = propagators.get(key)
            if prop is None:
                prop = linalg.expm(L.sup, step)
                propagators[key] = prop
            state = prop @ state
        out.append(unvec(state, L.dim))
        previous = float(tau)
    logger.debug(f"expm: {len(propagators)} distinct propagators for {grid.size} output times")
    return out


def _finalize(raw: ComplexMatrix) -> Tuple[DensityMatrix, float]:
    """Re-symmetrize; renormalize only when the trace drifted beyond the threshold."""
    mat = 0.5 * (raw + raw.conj().T)
    trace = float(np.trace(mat).real)
    drift = abs(trace - 1.0)
    if drift > TRACE_DRIFT_LIMIT:
        raise InvariantViolation(f"Trace drifted by {drift:.3e} during propagation")
    if drift > RENORMALIZE_THRESHOLD:
        mat = mat / trace
    return DensityMatrix(mat), drift


def _evolve(L: Liouvillian, rho0: Union[DensityMatrix, ComplexMatrix], tau_grid: Sequence[float],
            rtol: float, atol: float, method: Integrator) -> Tuple[np.ndarray, List[ComplexMatrix]]:
    grid = check_time_grid(tau_grid)
    if isinstance(rho0, DensityMatrix):
        rho0.check_positive()
    start = _as_array(L, rho0)
    if grid[-1] == 0.0:
        return grid, [start.copy() for _ in grid]
    if method == "expm":
        return grid, _evolve_expm(L, start, grid)
    if method == "rk45":
        return grid, _evolve_rk45(L, start, grid, rtol, atol)
    raise ValueError(f"Unknown integrator: {method}")


def propagate(
    L: Liouvillian,
    rho0: DensityMatrix,
    tau_grid: Sequence[float],
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    method: Integrator = "rk45",
) -> List[DensityMatrix]:
    """States ρ(τ) at every grid time, starting from ρ(0) = rho0."""
    _, raw = _evolve(L, rho0, tau_grid, tol, atol, method)
    return [_finalize(m)[0] for m in raw]


def propagate_record(
    L: Liouvillian,
    rho0: DensityMatrix,
    tau_grid: Sequence[float],
    hB: ComplexMatrix,
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    method: Integrator = "rk45",
) -> Tuple[TrajectoryRecord, List[DensityMatrix]]:
    """Propagate and tabulate E(τ), 𝓔(τ) and the per-step diagnostics."""
    grid, raw = _evolve(L, rho0, tau_grid, tol, atol, method)
    states, drifts = zip(*(_finalize(m) for m in raw))
    energies = np.array([energy(s, hB) for s in states])
    ergotropies = np.array([ergotropy(s, hB)[0] for s in states])
    min_eigs = np.array([s.min_eigenvalue for s in states])
    worst = float(min_eigs.min())
    if worst < -PSD_TOL:
        logger.warning(f"Smallest state eigenvalue along the trajectory is {worst:.3e}")
    record = TrajectoryRecord(
        times=grid,
        energy=energies,
        ergotropy=ergotropies,
        trace_err=np.array(drifts),
        min_eig=min_eigs,
        purity=np.array([s.purity for s in states]),
    )
    return record, list(states)


def taylor_term(L: Liouvillian, rho0: Union[DensityMatrix, ComplexMatrix], n: int) -> ComplexMatrix:
    """𝓛ⁿρ(0) by repeated application."""
    if n < 0:
        raise ValueError(f"Taylor order must be non-negative, got {n}")
    term = _as_array(L, rho0).copy()
    for _ in range(n):
        term = L.action(term)
    return term


def taylor_series(L: Liouvillian, rho0: DensityMatrix, order: int, tau: float) -> ComplexMatrix:
    """Σ_{n ≤ order} τⁿ/n! 𝓛ⁿρ(0)."""
    total = np.zeros((L.dim, L.dim), dtype=np.complex128)
    term = _as_array(L, rho0).copy()
    for k in range(order + 1):
        total += (tau**k / math.factorial(k)) * term
        term = L.action(term)
    return total


def short_time_check(L: Liouvillian, rho0: DensityMatrix, order: int, tau: float,
                     method: Integrator = "expm") -> float:
    """‖ρ(τ) − Σ_{n ≤ order} τⁿ/n! 𝓛ⁿρ(0)‖_F; scales as τ^{order+1} while ‖τ𝓛‖ < 1."""
    if tau == 0:
        exact = _as_array(L, rho0)
    elif method == "expm":
        exact = unvec(linalg.expm_apply(L.sup, vec(_as_array(L, rho0)), tau), L.dim)
    else:
        exact = propagate(L, rho0, [tau], tol=1e-12, atol=1e-14, method=method)[0].mat
    return linalg.frobenius(exact - taylor_series(L, rho0, order, tau))


def energy_taylor_coefficients(L: Liouvillian, rho0: DensityMatrix, hB: ComplexMatrix,
                               order: int) -> List[float]:
    """Derivatives dⁿE/dτⁿ at τ = 0, i.e. tr[h_B 𝓛ⁿρ(0)] for n = 0..order."""
    coefficients = []
    term = _as_array(L, rho0).copy()
    for _ in range(order + 1):
        coefficients.append(float(np.einsum("ij,ji->", hB, term).real))
        term = L.action(term)
    return coefficients


def eq9_reference(p: ModelParams) -> ComplexMatrix:
    """𝓛ρ(0) for ρ(0) = |0⟩⟨0|: iα(|0⟩⟨1| − |1⟩⟨0|)."""
    ref = np.zeros((p.dim, p.dim), dtype=np.complex128)
    ref[0, 1] = 1j * p.alpha
    ref[1, 0] = -1j * p.alpha
    return ref


def eq10_reference(p: ModelParams) -> ComplexMatrix:
    """𝓛²ρ(0) for ρ(0) = |0⟩⟨0| (needs dim ≥ 3).

    The |0⟩⟨0| coefficient is −2α², which keeps 𝓛²ρ(0) traceless.
    """
    if p.dim < 3:
        raise DimensionMismatch("The second-order reference needs dim ≥ 3")
    a = p.alpha
    shift = p.detuning + p.chi / (1.0 + p.n_s) if p.nonlinearity == "saturable" \
        else p.detuning + p.chi - p.n_s * p.chi
    ref = np.zeros((p.dim, p.dim), dtype=np.complex128)
    ref[1, 1] = 2 * a**2
    ref[0, 0] = -2 * a**2
    ref[0, 2] = ref[2, 0] = -(a**2) * math.sqrt(2)
    ref[0, 1] = 1j * a * (1j * shift - p.gamma / 2)
    ref[1, 0] = 1j * a * (1j * shift + p.gamma / 2)
    return ref
