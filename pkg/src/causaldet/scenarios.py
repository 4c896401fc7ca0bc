"""Causal scenarios and their exact correlation matrices.

Three mechanisms can relate the measured qubit pair: the second qubit is the
first evolved through a channel (direct cause), the two are halves of a shared
bipartite state (common cause), or each trial picks one of the two mechanisms
at random (probabilistic mixture).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .channels import MixedUnitaryChannel, _validate_qubit_density, channel_correlation
from .linalg import POS_TOL, RECON_TOL, det3
from .states import TwoQubitState, bloch_decompose


def _maximally_mixed_qubit() -> np.ndarray:
    return np.eye(2, dtype=complex) / 2.0


@dataclass(frozen=True)
class DirectCause:
    """Qubit B is qubit A after the channel; the input only matters shot-wise."""

    channel: MixedUnitaryChannel
    input_state: np.ndarray = field(default_factory=_maximally_mixed_qubit)

    def __post_init__(self) -> None:
        rho = _validate_qubit_density(self.input_state)
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "input_state", rho)


@dataclass(frozen=True)
class CommonCause:
    """The pair shares the given bipartite state."""

    state: TwoQubitState


@dataclass(frozen=True)
class Mixture:
    """Each trial is direct-cause with probability p, common-cause otherwise."""

    p: float
    channel: MixedUnitaryChannel
    state: TwoQubitState

    def __post_init__(self) -> None:
        p = float(self.p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"mixing probability must lie in [0, 1], got {p!r}")
        object.__setattr__(self, "p", p)


CausalScenario = Union[DirectCause, CommonCause, Mixture]


@dataclass(frozen=True)
class CorrelationMatrix:
    """3x3 matrix of Pauli-pair correlations plus its causal determinant."""

    c: np.ndarray
    delta: float

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float)
        if c.shape != (3, 3):
            raise ValueError(f"correlation matrix must be 3x3, got {c.shape}")
        worst = float(np.max(np.abs(c)))
        if worst > 1.0 + POS_TOL:
            raise ValueError(f"correlation entries must lie in [-1, 1], worst {worst!r}")
        delta = float(self.delta)
        if abs(delta - det3(c)) > RECON_TOL:
            raise ValueError(
                f"stored determinant {delta!r} disagrees with det of entries"
            )
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "delta", delta)


def causal_determinant(c: np.ndarray) -> float:
    """Determinant of a 3x3 correlation matrix: the causal determinant."""
    return float(det3(np.asarray(c, dtype=float)))


def correlation_from_entries(c: np.ndarray) -> CorrelationMatrix:
    return CorrelationMatrix(c, causal_determinant(c))


def exact_correlation(sc: CausalScenario) -> CorrelationMatrix:
    """Noise-free correlation matrix of a scenario.

    Direct cause: the channel's rotation average (input state provably does
    not enter).  Common cause: the state's correlation block.  Mixture: the
    convex combination of the two.
    """
    if isinstance(sc, DirectCause):
        c = channel_correlation(sc.channel)
    elif isinstance(sc, CommonCause):
        c = bloch_decompose(sc.state).m
    elif isinstance(sc, Mixture):
        c_dc = channel_correlation(sc.channel)
        c_cc = bloch_decompose(sc.state).m
        c = sc.p * c_dc + (1.0 - sc.p) * c_cc
    else:
        raise TypeError(f"not a causal scenario: {type(sc).__name__}")
    return correlation_from_entries(c)
