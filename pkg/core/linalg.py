"""
Saturable Battery Simulator - Dense Linear Algebra Kernel

Thin, checked wrappers around LAPACK (via scipy.linalg) for the operations the rest of
the simulator needs: Hermitian and general eigendecompositions, linear solves and
matrix exponentials. Storage is always a dense complex128 ndarray.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt
import scipy.linalg
from scipy.sparse.linalg import expm_multiply

from core.errors import (
    ConvergenceFailure,
    DimensionMismatch,
    NonFiniteEntries,
    NonHermitianInput,
    OverflowRisk,
    SingularMatrix,
)

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
ComplexVector = npt.NDArray[np.complex128]
RealVector = npt.NDArray[np.float64]

# Defaults, overridable per call
HERMITIAN_TOL = 1e-9
PIVOT_RTOL = 1e-13
OVERFLOW_BOUND = 1e5


@dataclass(frozen=True)
class HermitianEigenResult:
    """Ascending eigenvalues with eigenvectors as unitary columns."""
    eigenvalues: RealVector
    eigenvectors: ComplexMatrix


@dataclass(frozen=True)
class GeneralEigenResult:
    """Eigenvalues (unordered) with right eigenvectors as columns.

    left_vectors holds w_n with w_n^H A = λ_n w_n^H when requested.
    """
    eigenvalues: ComplexVector
    right_vectors: ComplexMatrix
    left_vectors: Optional[ComplexMatrix] = None


def as_matrix(a) -> ComplexMatrix:
    """Coerce to a square, finite, complex128 matrix."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatch(f"Expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteEntries("Matrix contains NaN or Inf entries")
    return m


def dagger(a: ComplexMatrix) -> ComplexMatrix:
    return a.conj().T


def hermitize(a: ComplexMatrix) -> ComplexMatrix:
    return 0.5 * (a + a.conj().T)


def frobenius(a) -> float:
    return float(np.linalg.norm(a))


def hermitian_eig(a, tol: float = HERMITIAN_TOL) -> HermitianEigenResult:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (A + A†)/2 before decomposing, after checking that
    ‖A − A†‖_F ≤ tol·‖A‖_F.
    """
    m = as_matrix(a)
    asym = frobenius(m - dagger(m))
    if asym > tol * frobenius(m):
        raise NonHermitianInput(f"‖A − A†‖_F = {asym:.3e} exceeds {tol:.1e}·‖A‖_F")
    try:
        w, v = scipy.linalg.eigh(hermitize(m))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"Hermitian eigensolver did not converge: {exc}") from exc
    return HermitianEigenResult(eigenvalues=w, eigenvectors=v)


def general_eig(a, left: bool = False) -> GeneralEigenResult:
    """Eigendecomposition of a general complex matrix (QR algorithm, LAPACK zgeev)."""
    m = as_matrix(a)
    try:
        if left:
            w, vl, vr = scipy.linalg.eig(m, left=True, right=True)
        else:
            w, vr = scipy.linalg.eig(m)
            vl = None
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"General eigensolver did not converge: {exc}") from exc
    return GeneralEigenResult(eigenvalues=w, right_vectors=vr, left_vectors=vl)


def solve(a, rhs, pivot_rtol: float = PIVOT_RTOL) -> ComplexVector:
    """Solve A x = rhs by partial-pivoting LU.

    Raises SingularMatrix when the smallest pivot falls below pivot_rtol times the
    largest one.
    """
    m = as_matrix(a)
    b = np.asarray(rhs, dtype=np.complex128)
    if b.shape[0] != m.shape[0]:
        raise DimensionMismatch(f"rhs length {b.shape[0]} does not match dim {m.shape[0]}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    pivots = np.abs(np.diag(lu))
    largest = pivots.max()
    if largest == 0.0 or pivots.min() <= pivot_rtol * largest:
        raise SingularMatrix(
            f"Rank deficiency detected: min pivot {pivots.min():.3e}, max pivot {largest:.3e}"
        )
    x = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    residual = np.linalg.norm(m @ x - b)
    logger.debug(f"solve: dim={m.shape[0]} residual={residual:.3e}")
    return x


def _check_exponent(m: ComplexMatrix, t: float, bound: float) -> None:
    if t < 0:
        raise ValueError(f"Propagation time must be non-negative, got {t}")
    scaled = t * np.linalg.norm(m, 1)
    if scaled > bound:
        raise OverflowRisk(f"‖tA‖₁ = {scaled:.3e} exceeds the safety bound {bound:.1e}")


def expm_apply(a, v, t: float, bound: float = OVERFLOW_BOUND) -> ComplexVector:
    """exp(tA) v without forming exp(tA) (truncated Taylor with scaling, Al-Mohy & Higham)."""
    m = as_matrix(a)
    vec = np.asarray(v, dtype=np.complex128)
    if vec.shape[0] != m.shape[0]:
        raise DimensionMismatch(f"vector length {vec.shape[0]} does not match dim {m.shape[0]}")
    _check_exponent(m, t, bound)
    if t == 0:
        return vec.copy()
    return expm_multiply(t * m, vec)


def expm(a, t: float = 1.0, bound: float = OVERFLOW_BOUND) -> ComplexMatrix:
    """Full propagator exp(tA) by scaling and squaring with Padé approximation."""
    m = as_matrix(a)
    _check_exponent(m, t, bound)
    if t == 0:
        return np.eye(m.shape[0], dtype=np.complex128)
    return scipy.linalg.expm(t * m)
