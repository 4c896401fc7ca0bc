"""Direct-cause mechanisms: unitaries, mixed-unitary channels, Bloch rotations.

A single-qubit unitary acts on the Bloch sphere as an SO(3) rotation; a convex
mixture of unitary conjugations (a unital channel) acts as the matching convex
mixture of rotations.  The correlation matrix of a direct-cause mechanism is
the transpose of that rotation average.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import IMAG_TOL, PAULI_VECTOR, POS_TOL, RECON_TOL, UNITARY_TOL, pauli

WEIGHT_SUM_TOL = 1e-6  # ingestion: weight sums off by less than this are normalized


@dataclass(frozen=True)
class Unitary2:
    """Validated 2x2 unitary."""

    u: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=complex)
        if u.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {u.shape}")
        if np.max(np.abs(u @ u.conj().T - np.eye(2))) > UNITARY_TOL:
            raise ValueError("matrix is not unitary within tolerance")
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "u", u)


@dataclass(frozen=True)
class MixedUnitaryChannel:
    """Convex combination of unitary conjugations (a unital qubit channel)."""

    weights: np.ndarray
    unitaries: tuple[Unitary2, ...]

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        unitaries = tuple(self.unitaries)
        if len(unitaries) < 1:
            raise ValueError("channel needs at least one unitary term")
        if weights.shape[0] != len(unitaries):
            raise ValueError(
                f"{weights.shape[0]} weights for {len(unitaries)} unitaries"
            )
        if np.any(weights < 0.0):
            raise ValueError(f"weights must be non-negative, got {weights.tolist()}")
        total = float(weights.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, expected 1")
        if abs(total - 1.0) > 1e-12:
            warnings.warn(
                f"channel weights sum to {total!r}; normalizing", stacklevel=2
            )
        weights = weights / total
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "unitaries", unitaries)

    @property
    def ndc(self) -> int:
        """Number of unitary terms."""
        return len(self.unitaries)


def unitary_channel(u: Unitary2 | np.ndarray) -> MixedUnitaryChannel:
    """Single-unitary channel."""
    if not isinstance(u, Unitary2):
        u = Unitary2(u)
    return MixedUnitaryChannel(np.array([1.0]), (u,))


def axis_angle_unitary(axis: np.ndarray, angle: float) -> Unitary2:
    """exp(-i * angle * (axis . sigma) / 2) for a unit (or normalizable) axis."""
    axis = np.asarray(axis, dtype=float).reshape(3)
    norm = float(np.linalg.norm(axis))
    if norm == 0.0:
        raise ValueError("rotation axis must be nonzero")
    n = axis / norm
    half = float(angle) / 2.0
    u = np.cos(half) * pauli(0) - 1j * np.sin(half) * (
        n[0] * pauli(1) + n[1] * pauli(2) + n[2] * pauli(3)
    )
    return Unitary2(u)


def haar_random_unitary(rng: np.random.Generator) -> Unitary2:
    """Haar-distributed 2x2 unitary: QR of a complex Ginibre matrix, phases fixed."""
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phases = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1.0)), 1.0)
    return Unitary2(q * phases)


def haar_random_unitaries(count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of `count` Haar unitaries, shape (count, 2, 2); consumes the
    generator exactly like repeated haar_random_unitary calls, so the batch
    reproduces the sequential draws bit for bit."""
    draws = rng.standard_normal((count, 2, 4))
    z = (draws[:, 0, :] + 1j * draws[:, 1, :]).reshape(count, 2, 2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phases = np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1.0)), 1.0)
    return q * phases[..., None, :]


def rotation_of(u: Unitary2 | np.ndarray) -> np.ndarray:
    """SO(3) rotation of the Bloch sphere induced by conjugation with u.

    Entry (j, k) is Re tr(sigma_j u sigma_k u^dag) / 2; the imaginary part is
    asserted to be numerical dust.
    """
    mat = u.u if isinstance(u, Unitary2) else Unitary2(u).u
    return rotations_of(mat[None, :, :])[0]


def rotations_of(us: np.ndarray) -> np.ndarray:
    """Vectorised rotation_of for a stack of shape (n, 2, 2)."""
    us = np.asarray(us, dtype=complex)
    if us.ndim != 3 or us.shape[1:] != (2, 2):
        raise ValueError(f"expected shape (n, 2, 2), got {us.shape}")
    # tr(sigma_j U sigma_k U^dag) = sum sigma_j[a,b] U[b,c] sigma_k[c,d] conj(U[a,d])
    raw = 0.5 * np.einsum(
        "jab,nbc,kcd,nad->njk", PAULI_VECTOR, us, PAULI_VECTOR, us.conj(), optimize=True
    )
    worst = float(np.max(np.abs(raw.imag)))
    if worst > IMAG_TOL:
        raise ValueError(f"rotation entries have imaginary part {worst:.3g}")
    return raw.real


def _validate_qubit_density(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 density matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > RECON_TOL:
        raise ValueError("input state is not Hermitian")
    if abs(float(rho.trace().real) - 1.0) > 1e-10:
        raise ValueError(f"input state has trace {rho.trace().real!r}, expected 1")
    evs = np.linalg.eigvalsh(rho)
    if evs[0] < -POS_TOL:
        raise ValueError(f"input state has negative eigenvalue {evs[0]:.6g}")
    return rho


def apply_channel(ch: MixedUnitaryChannel, rho_a: np.ndarray) -> np.ndarray:
    """Evolve a single-qubit density matrix through the channel."""
    rho_a = _validate_qubit_density(rho_a)
    out = np.zeros((2, 2), dtype=complex)
    for a_m, term in zip(ch.weights, ch.unitaries):
        out += a_m * (term.u @ rho_a @ term.u.conj().T)
    return out


def channel_correlation(ch: MixedUnitaryChannel) -> np.ndarray:
    """Correlation matrix of the direct-cause mechanism: weighted sum of the
    transposed Bloch rotations of the unitary terms."""
    out = np.zeros((3, 3))
    for a_m, term in zip(ch.weights, ch.unitaries):
        out += a_m * rotation_of(term).T
    return out
