"""Shot-based simulation of the nine-setting measurement protocol.

Each setting measures sigma_j on qubit A and sigma_k on qubit B; a trial
yields an outcome pair in {+1, -1}^2.  Counts per setting are drawn from the
exact four-outcome law of the scenario, which is distributionally identical
to looping over trials (branch choice, collapse, evolution, Born rule) but
runs at fixed cost per setting.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import det3, pauli
from .rng import derive_rng, make_rng
from .scenarios import (
    CausalScenario,
    CommonCause,
    CorrelationMatrix,
    DirectCause,
    Mixture,
    correlation_from_entries,
)

AXES = (1, 2, 3)
SETTINGS = tuple((j, k) for j in AXES for k in AXES)

_BOOTSTRAP_MIN = 100


@dataclass(frozen=True)
class ShotCounts:
    """Outcome counts for one (j, k) setting: (+,+), (+,-), (-,+), (-,-)."""

    j: int
    k: int
    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int

    def __post_init__(self) -> None:
        if self.j not in AXES or self.k not in AXES:
            raise ValueError(f"setting axes must be in 1..3, got ({self.j}, {self.k})")
        for name in ("n_pp", "n_pm", "n_mp", "n_mm"):
            if getattr(self, name) < 0:
                raise ValueError(f"negative count {name}")

    @property
    def total(self) -> int:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm


@dataclass(frozen=True)
class ExperimentData:
    """Counts for all nine settings plus the provenance needed to rerun them."""

    records: tuple[ShotCounts, ...]
    shots_per_setting: int
    seed: int
    scenario_descriptor: Optional[dict] = None

    def __post_init__(self) -> None:
        settings = tuple((r.j, r.k) for r in self.records)
        if sorted(settings) != sorted(SETTINGS):
            raise ValueError(f"need each of the nine settings exactly once, got {settings}")
        object.__setattr__(self, "records", tuple(self.records))

    def record(self, j: int, k: int) -> ShotCounts:
        for r in self.records:
            if r.j == j and r.k == k:
                return r
        raise KeyError((j, k))


def _projector(axis: int, sign: int) -> np.ndarray:
    return (pauli(0) + sign * pauli(axis)) / 2.0


def setting_probabilities(sc: CausalScenario, j: int, k: int) -> np.ndarray:
    """Joint law of the outcome pair for one setting, ordered (++, +-, -+, --)."""
    if j not in AXES or k not in AXES:
        raise ValueError(f"setting axes must be in 1..3, got ({j}, {k})")
    if isinstance(sc, Mixture):
        p_dc = setting_probabilities(DirectCause(sc.channel), j, k)
        p_cc = setting_probabilities(CommonCause(sc.state), j, k)
        probs = sc.p * p_dc + (1.0 - sc.p) * p_cc
    elif isinstance(sc, DirectCause):
        probs = np.empty(4)
        for ia, a in enumerate((1, -1)):
            p_a = float(np.trace(sc.input_state @ _projector(j, a)).real)
            # projective collapse: the post-measurement state is the projector
            evolved = np.zeros((2, 2), dtype=complex)
            post = _projector(j, a)
            for a_m, term in zip(sc.channel.weights, sc.channel.unitaries):
                evolved += a_m * (term.u @ post @ term.u.conj().T)
            p_b_plus = float(np.trace(evolved @ _projector(k, 1)).real)
            probs[2 * ia] = p_a * p_b_plus
            probs[2 * ia + 1] = p_a * (1.0 - p_b_plus)
    elif isinstance(sc, CommonCause):
        rho = sc.state.rho
        probs = np.empty(4)
        for ia, a in enumerate((1, -1)):
            for ib, b in enumerate((1, -1)):
                op = np.kron(_projector(j, a), _projector(k, b))
                probs[2 * ia + ib] = float(np.trace(rho @ op).real)
    else:
        raise TypeError(f"not a causal scenario: {type(sc).__name__}")
    if probs.min() < -1e-12:
        raise ValueError(f"negative outcome probability {probs.min():.3g}")
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def simulate_setting(
    sc: CausalScenario, j: int, k: int, shots: int, rng: np.random.Generator
) -> ShotCounts:
    """Draw `shots` outcome pairs for one setting."""
    if shots < 1:
        raise ValueError(f"shots must be at least 1, got {shots!r}")
    counts = rng.multinomial(shots, setting_probabilities(sc, j, k))
    return ShotCounts(j, k, *(int(c) for c in counts))


def run_experiment(
    sc: CausalScenario,
    shots_per_setting: int,
    seed: int,
    descriptor: Optional[dict] = None,
) -> ExperimentData:
    """Simulate all nine settings; deterministic given (scenario, shots, seed).

    Each setting owns a sub-stream derived from the seed, so results do not
    depend on evaluation order.
    """
    if shots_per_setting < 1:
        raise ValueError(f"shots_per_setting must be at least 1, got {shots_per_setting!r}")
    if descriptor is None:
        from .serialize import scenario_to_json  # lazy: serialize imports this module

        descriptor = scenario_to_json(sc)
    records = []
    for idx, (j, k) in enumerate(SETTINGS):
        rng = derive_rng(seed, idx)
        records.append(simulate_setting(sc, j, k, shots_per_setting, rng))
    return ExperimentData(tuple(records), shots_per_setting, int(seed), descriptor)


def estimate_correlation(data: ExperimentData) -> tuple[CorrelationMatrix, np.ndarray]:
    """Empirical correlation matrix and its per-entry standard errors.

    c_hat = (n_pp + n_mm - n_pm - n_mp) / n and se = sqrt((1 - c_hat^2) / n).
    """
    c_hat = np.empty((3, 3))
    se = np.empty((3, 3))
    for r in data.records:
        n = r.total
        if n == 0:
            raise ValueError(f"no counts recorded for setting ({r.j}, {r.k})")
        c = (r.n_pp + r.n_mm - r.n_pm - r.n_mp) / n
        c_hat[r.j - 1, r.k - 1] = c
        se[r.j - 1, r.k - 1] = np.sqrt(max(1.0 - c * c, 0.0) / n)
    return correlation_from_entries(c_hat), se


def bootstrap_delta(
    data: ExperimentData, resamples: int = 1000, seed: int = 0
) -> tuple[float, tuple[float, float]]:
    """Percentile bootstrap for the causal determinant.

    Per setting, cell counts are redrawn from a multinomial with the empirical
    frequencies; the determinant is recomputed per resample and the 2.5/97.5
    percentiles bound the interval.  Returns (point estimate, (lo, hi)).
    """
    if resamples < _BOOTSTRAP_MIN:
        raise ValueError(f"need at least {_BOOTSTRAP_MIN} resamples, got {resamples!r}")
    est, _ = estimate_correlation(data)
    rng = make_rng(seed)
    c_star = np.empty((resamples, 3, 3))
    for r in data.records:
        n = r.total
        freqs = np.array([r.n_pp, r.n_pm, r.n_mp, r.n_mm], dtype=float) / n
        draws = rng.multinomial(n, freqs, size=resamples)
        c_star[:, r.j - 1, r.k - 1] = (
            draws[:, 0] + draws[:, 3] - draws[:, 1] - draws[:, 2]
        ) / n
    deltas = det3(c_star)
    lo, hi = np.percentile(deltas, [2.5, 97.5])
    return est.delta, (float(lo), float(hi))
