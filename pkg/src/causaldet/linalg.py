"""Small dense linear algebra: Pauli basis, tensor products, 3x3 determinants.

Every numerical tolerance used across the package is a named constant here so
that all modules agree on what "zero" means.
"""
from __future__ import annotations

import numpy as np

POS_TOL = 1e-9      # eigenvalue positivity slack for density matrices
UNITARY_TOL = 1e-10  # unitarity / SO(3) orthogonality checks
RECON_TOL = 1e-12   # entrywise reconstruction and hermiticity checks
TRACE_TOL = 1e-10   # trace normalisation of density matrices
IMAG_TOL = 1e-10    # imaginary dust allowed on analytically real traces

_PAULI = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _m in _PAULI:
    _m.setflags(write=False)

# sigma_1..sigma_3 stacked, for vectorised expressions
PAULI_VECTOR = np.stack(_PAULI[1:])
PAULI_VECTOR.setflags(write=False)


def pauli(index: int) -> np.ndarray:
    """Identity (index 0) or Pauli matrix sigma_1..sigma_3; read-only view."""
    if index not in (0, 1, 2, 3):
        raise ValueError(f"Pauli index must be in 0..3, got {index!r}")
    return _PAULI[index]


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product of two 2x2 matrices (blocks ordered by rows of `a`)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError(f"kron expects two 2x2 matrices, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def is_hermitian(m: np.ndarray, tol: float = RECON_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) <= tol)


def hermitian_eigenvalues(h: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending.

    Raises ValueError if the input is not Hermitian within `tol`.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(h)


def det3(m: np.ndarray) -> float | np.ndarray:
    """Determinant of a 3x3 matrix by cofactor expansion.

    Accepts stacked input of shape (..., 3, 3) and returns the determinants
    with shape (...).  A plain 3x3 input yields a Python float.
    """
    m = np.asarray(m, dtype=float)
    if m.shape[-2:] != (3, 3):
        raise ValueError(f"det3 expects shape (..., 3, 3), got {m.shape}")
    d = (
        m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
        - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
        + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0])
    )
    if m.ndim == 2:
        return float(d)
    return d


def is_so3(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    """True iff m^T m = 1 within `tol` and det(m) = +1 within `tol`."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        return False
    if np.max(np.abs(m.T @ m - np.eye(3))) > tol:
        return False
    return abs(det3(m) - 1.0) <= tol
