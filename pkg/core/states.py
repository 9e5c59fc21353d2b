"""
Saturable Battery Simulator - Density Matrices

DensityMatrix wraps an N×N complex array that is Hermitian and trace-one within
tolerance. Positivity (smallest eigenvalue >= -PSD_TOL) is enforced on states built
from user data and on every initial state handed to the propagator; propagated states
carry their smallest eigenvalue as a diagnostic instead.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from core.errors import DimensionTooSmall, InvariantViolation
from core.linalg import ComplexMatrix, as_matrix, frobenius

HERMITICITY_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = 1e-8


@dataclass(frozen=True)
class DensityMatrix:
    mat: ComplexMatrix = field(repr=False)

    def __post_init__(self):
        m = as_matrix(self.mat)
        object.__setattr__(self, "mat", m)
        asym = frobenius(m - m.conj().T)
        if asym > HERMITICITY_TOL:
            raise InvariantViolation(f"State is not Hermitian: ‖ρ − ρ†‖_F = {asym:.3e}")
        drift = abs(np.trace(m) - 1.0)
        if drift > TRACE_TOL:
            raise InvariantViolation(f"State trace deviates from 1 by {drift:.3e}")

    @classmethod
    def from_array(cls, a, psd_tol: float = PSD_TOL) -> "DensityMatrix":
        """Build a state from user data, checking all invariants including positivity."""
        return cls(a).check_positive(psd_tol)

    def check_positive(self, psd_tol: float = PSD_TOL) -> "DensityMatrix":
        if self.min_eigenvalue < -psd_tol:
            raise InvariantViolation(
                f"State is not positive semidefinite: min eigenvalue {self.min_eigenvalue:.3e}"
            )
        return self

    @classmethod
    def fock(cls, dim: int, n: int = 0) -> "DensityMatrix":
        if dim < 2:
            raise DimensionTooSmall(f"Fock truncation must be at least 2, got {dim}")
        m = np.zeros((dim, dim), dtype=np.complex128)
        m[n, n] = 1.0
        return cls(m)

    @classmethod
    def ground(cls, dim: int) -> "DensityMatrix":
        return cls.fock(dim, 0)

    @classmethod
    def coherent(cls, dim: int, beta: complex) -> "DensityMatrix":
        """Truncated coherent state |β⟩⟨β|, renormalized on the retained levels."""
        if beta == 0:
            return cls.ground(dim)
        n = np.arange(dim)
        # e^{-|β|²/2} drops out in the renormalization
        log_amp = n * np.log(abs(beta)) - 0.5 * gammaln(n + 1)
        psi = np.exp(log_amp) * np.exp(1j * np.angle(beta) * n)
        psi /= np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.mat + self.mat.conj().T))

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    @property
    def purity(self) -> float:
        return float(np.real(np.vdot(self.mat, self.mat)))

    def population(self, n: int) -> float:
        return float(self.mat[n, n].real)
