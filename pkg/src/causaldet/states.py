"""Two-qubit states: construction, validation, and Bloch decomposition.

A state is a 4x4 density matrix; its Bloch form is the pair of local vectors
plus the 3x3 correlation block, which is what the measurement statistics of
a shared-state mechanism expose.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    IMAG_TOL,
    POS_TOL,
    RECON_TOL,
    TRACE_TOL,
    det3,
    kron,
    pauli,
)


class UnphysicalStateError(ValueError):
    """A matrix fails the density-matrix requirements (trace one, PSD)."""


def _frozen_array(obj, name: str, value: np.ndarray) -> None:
    value = value.copy()
    value.setflags(write=False)
    object.__setattr__(obj, name, value)


@dataclass(frozen=True)
class TwoQubitState:
    """Validated 4x4 density matrix of a qubit pair."""

    rho: np.ndarray

    def __post_init__(self) -> None:
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise UnphysicalStateError(f"expected a 4x4 matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > RECON_TOL:
            raise UnphysicalStateError("not a physical state: matrix is not Hermitian")
        tr = float(rho.trace().real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise UnphysicalStateError(f"not a physical state: trace is {tr!r}, expected 1")
        evs = np.linalg.eigvalsh(rho)
        if evs[0] < -POS_TOL:
            raise UnphysicalStateError(
                f"not a physical state: most negative eigenvalue is {evs[0]:.6g}"
            )
        _frozen_array(self, "rho", rho)

    def eigenvalues(self) -> np.ndarray:
        """Spectrum, ascending."""
        return np.linalg.eigvalsh(self.rho)


@dataclass(frozen=True)
class BlochForm:
    """Local Bloch vectors and correlation block of a two-qubit state."""

    v_a: np.ndarray
    v_b: np.ndarray
    m: np.ndarray

    def __post_init__(self) -> None:
        v_a = np.asarray(self.v_a, dtype=float).reshape(3)
        v_b = np.asarray(self.v_b, dtype=float).reshape(3)
        m = np.asarray(self.m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"correlation block must be 3x3, got {m.shape}")
        worst = max(np.max(np.abs(v_a)), np.max(np.abs(v_b)), np.max(np.abs(m)))
        if worst > 1.0 + POS_TOL:
            raise ValueError(f"Bloch components must lie in [-1, 1], worst is {worst!r}")
        _frozen_array(self, "v_a", v_a)
        _frozen_array(self, "v_b", v_b)
        _frozen_array(self, "m", m)


def _real_trace(mat: np.ndarray) -> float:
    tr = complex(np.trace(mat))
    if abs(tr.imag) > IMAG_TOL:
        raise ValueError(f"trace expected real, has imaginary part {tr.imag!r}")
    return tr.real


def bloch_decompose(state: TwoQubitState) -> BlochForm:
    """Expand rho in the Pauli product basis: local vectors plus 3x3 block."""
    rho = state.rho
    eye = pauli(0)
    v_a = np.empty(3)
    v_b = np.empty(3)
    m = np.empty((3, 3))
    for j in range(3):
        v_a[j] = _real_trace(rho @ kron(pauli(j + 1), eye))
        v_b[j] = _real_trace(rho @ kron(eye, pauli(j + 1)))
        for k in range(3):
            m[j, k] = _real_trace(rho @ kron(pauli(j + 1), pauli(k + 1)))
    return BlochForm(v_a, v_b, m)


def bloch_compose(form: BlochForm) -> TwoQubitState:
    """Rebuild the density matrix from a Bloch form; rejects unphysical input."""
    eye = pauli(0)
    rho = kron(eye, eye).astype(complex)
    for j in range(3):
        rho += form.v_a[j] * kron(pauli(j + 1), eye)
        rho += form.v_b[j] * kron(eye, pauli(j + 1))
        for k in range(3):
            rho += form.m[j, k] * kron(pauli(j + 1), pauli(k + 1))
    return TwoQubitState(rho / 4.0)


_BELL_VECTORS = (
    np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2.0),   # phi+
    np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2.0),  # phi-
    np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2.0),   # psi+
    np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2.0),  # psi-
)

BELL_NAMES = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")

SINGLET_INDEX = 3


def bell_state(index: int) -> TwoQubitState:
    """One of the four Bell states: 0 phi+, 1 phi-, 2 psi+, 3 psi- (singlet)."""
    if index not in (0, 1, 2, 3):
        raise ValueError(f"Bell index must be in 0..3, got {index!r}")
    psi = _BELL_VECTORS[index]
    return TwoQubitState(np.outer(psi, psi.conj()))


def werner_state(omega: float) -> TwoQubitState:
    """Isotropic mixture (1-omega) * I/4 + omega * singlet, omega in [-1/3, 1]."""
    omega = float(omega)
    if not -1.0 / 3.0 - 1e-12 <= omega <= 1.0 + 1e-12:
        raise UnphysicalStateError(
            f"not a physical state: mixing weight {omega!r} outside [-1/3, 1]"
        )
    singlet = bell_state(SINGLET_INDEX).rho
    return TwoQubitState((1.0 - omega) * np.eye(4) / 4.0 + omega * singlet)


def random_state(rng: np.random.Generator) -> TwoQubitState:
    """Hilbert-Schmidt random state: G G^dag / tr(G G^dag) with complex Gaussian G."""
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    return TwoQubitState(rho / rho.trace().real)


_PAULI_PAIRS = np.stack(
    [np.stack([kron(pauli(j), pauli(k)) for k in (1, 2, 3)]) for j in (1, 2, 3)]
)
_PAULI_PAIRS.setflags(write=False)


def random_correlation_blocks(count: int, rng: np.random.Generator) -> np.ndarray:
    """Correlation blocks of `count` Hilbert-Schmidt random states, shape (count, 3, 3).

    Consumes the generator exactly like repeated random_state calls, so the
    batch reproduces the per-object draws bit for bit; the object path
    (random_state + bloch_decompose) is the oracle it is tested against.
    """
    draws = rng.standard_normal((count, 2, 16))
    g = (draws[:, 0, :] + 1j * draws[:, 1, :]).reshape(count, 4, 4)
    rho = g @ g.conj().transpose(0, 2, 1)
    rho /= np.trace(rho, axis1=-2, axis2=-1).real[:, None, None]
    m = np.einsum("sab,jkba->sjk", rho, _PAULI_PAIRS, optimize=True)
    worst = float(np.max(np.abs(m.imag)))
    if worst > IMAG_TOL:
        raise ValueError(f"correlation entries have imaginary part {worst:.3g}")
    return m.real


def depolarize(state: TwoQubitState, eps: float) -> TwoQubitState:
    """Mix toward the maximally mixed state; scales the correlation block by 1-eps."""
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"depolarizing weight must lie in [0, 1], got {eps!r}")
    return TwoQubitState((1.0 - eps) * state.rho + eps * np.eye(4) / 4.0)


def fidelity_pure(target: TwoQubitState, state: TwoQubitState) -> float:
    """Overlap <psi|rho|psi> with a pure target state."""
    evs = target.eigenvalues()
    if evs[-2] > 1e-9:
        raise ValueError(
            f"target state is not rank one: second eigenvalue is {evs[-2]:.6g}"
        )
    return float(np.trace(target.rho @ state.rho).real)


def diagonalize_correlation(
    m: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Factor a 3x3 correlation block as r_a @ diag(t) @ r_b.T with r_a, r_b in SO(3).

    Uses an SVD with a sign fix: a factor with determinant -1 has its third
    column negated, the sign moving into t.  Hence det(m) = t[0]*t[1]*t[2] and
    the rotations are proper.  The factorization is not unique under degenerate
    singular values; any valid triple may be returned.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    u, s, vt = np.linalg.svd(m)
    r_a = u.copy()
    r_b = vt.T.copy()
    t = s.copy()
    if det3(r_a) < 0:
        r_a[:, 2] *= -1.0
        t[2] *= -1.0
    if det3(r_b) < 0:
        r_b[:, 2] *= -1.0
        t[2] *= -1.0
    return r_a, r_b, t
