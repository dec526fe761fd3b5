"""2x2 complex linear algebra and qubit state representations.

States and operators are plain 2x2 complex ``numpy`` arrays throughout the
package; this module owns the conversions between kets, density matrices
and Bloch vectors, plus the single validation routine that every density
matrix produced anywhere in the pipeline must pass.

Basis convention, fixed globally: |0> = |H> (horizontal), |1> = |V>
(vertical).  Global phases are never tracked at the density-matrix level.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    InvalidDensityMatrixError,
    NotHermitianError,
    NotNormalizedError,
    OutsideBlochBallError,
)

# Tolerances used by the validity checks below.
HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
KET_NORM_ATOL = 1e-9
DEGENERACY_GAP = 1e-12

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

KET_H = np.array([1.0, 0.0], dtype=complex)
KET_V = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
KET_MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)

for _const in (IDENTITY, PAULI_X, PAULI_Y, PAULI_Z, KET_H, KET_V, KET_PLUS, KET_MINUS):
    _const.setflags(write=False)
del _const


def _all_finite(a: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag)))


def as_matrix(m) -> np.ndarray:
    """Coerce input to a 2x2 complex array, rejecting anything else."""
    out = np.asarray(m, dtype=complex)
    if out.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {out.shape}")
    if not _all_finite(out):
        raise ValueError("matrix contains non-finite entries")
    return out


def as_ket(k) -> np.ndarray:
    """Coerce input to a length-2 complex vector."""
    out = np.asarray(k, dtype=complex)
    if out.shape != (2,):
        raise ValueError(f"expected a 2-component ket, got shape {out.shape}")
    if not _all_finite(out):
        raise ValueError("ket contains non-finite entries")
    return out


def dagger(m) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def hermiticity_defect(m) -> float:
    """Largest entrywise deviation of m from its adjoint."""
    m = np.asarray(m)
    return float(np.abs(m - dagger(m)).max())


def hermitian_eigensystem(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvector columns of a Hermitian matrix.

    For a (near-)degenerate spectrum the canonical basis (|0>, |1>) is
    returned, which is exact: a 2x2 Hermitian matrix with equal eigenvalues
    is a multiple of the identity.
    """
    m = as_matrix(m)
    if hermiticity_defect(m) > 1e-10:
        raise NotHermitianError(
            f"matrix deviates from Hermiticity by {hermiticity_defect(m):.3e}"
        )
    vals, vecs = np.linalg.eigh(m)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    if vals[0] - vals[1] < DEGENERACY_GAP:
        return vals, IDENTITY.copy()
    return vals, vecs


def density_from_ket(k) -> np.ndarray:
    """Rank-1 density matrix |k><k| of a normalized ket."""
    k = as_ket(k)
    norm_sq = float(np.vdot(k, k).real)
    if abs(norm_sq - 1.0) > KET_NORM_ATOL:
        raise NotNormalizedError(f"ket norm^2 = {norm_sq!r} deviates from 1")
    return np.outer(k, k.conj())


def bloch_to_density(r) -> np.ndarray:
    """Density matrix (1 + r . sigma) / 2 for a Bloch vector inside the ball."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError(f"expected a 3-component Bloch vector, got shape {r.shape}")
    norm = float(np.sqrt(r @ r))
    if norm > 1.0 + 1e-10:
        raise OutsideBlochBallError(f"Bloch vector has length {norm!r} > 1")
    x, y, z = r
    return 0.5 * (IDENTITY + x * PAULI_X + y * PAULI_Y + z * PAULI_Z)


def density_to_bloch(rho) -> np.ndarray:
    """Bloch vector (x, y, z) of a density matrix."""
    rho = as_matrix(rho)
    x = 2.0 * rho[0, 1].real
    y = -2.0 * rho[0, 1].imag
    z = (rho[0, 0] - rho[1, 1]).real
    return np.array([x, y, z])


def purity(rho) -> float:
    """Tr(rho^2); 1 for pure states, 1/2 for the maximally mixed state."""
    rho = as_matrix(rho)
    return float(np.trace(rho @ rho).real)


def validate_density_matrix(rho, where: str = "") -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return the matrix.

    This is the single gate through which every density matrix produced by
    the package passes.  Tolerances: Hermiticity and trace to 1e-12
    entrywise, eigenvalues above -1e-10.
    """
    rho = as_matrix(rho)
    label = f" ({where})" if where else ""
    defect = hermiticity_defect(rho)
    if defect > HERMITICITY_ATOL:
        raise InvalidDensityMatrixError(f"not Hermitian{label}: defect {defect:.3e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > TRACE_ATOL:
        raise InvalidDensityMatrixError(f"trace {tr!r} != 1{label}")
    eigenvalues = np.linalg.eigvalsh(rho)
    if eigenvalues.min() < EIGENVALUE_FLOOR:
        raise InvalidDensityMatrixError(
            f"negative eigenvalue {eigenvalues.min():.3e}{label}"
        )
    return rho
