"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test prints one PASS line when its criterion holds; a failing criterion
fails its test.  The boundary tables (criterion 5) are computed once at full
size and shared with criteria 6 and 8.
"""
import time

import numpy as np
import pytest

from causaldet.bounds import (
    boundary_tables,
    random_mixture_deltas,
    witness_equal_pauli_flips,
    witness_half_identity_half_flip,
    witness_singlet,
    witness_werner_edge,
)
from causaldet.channels import (
    MixedUnitaryChannel,
    Unitary2,
    haar_random_unitaries,
    haar_random_unitary,
    rotations_of,
    unitary_channel,
)
from causaldet.inference import NOT_PURE_DC, UNDETERMINED, YES, classify, p_range
from causaldet.linalg import det3
from causaldet.rng import derive_rng, make_rng
from causaldet.sampling import bootstrap_delta, estimate_correlation, run_experiment
from causaldet.scenarios import CommonCause, DirectCause, Mixture, exact_correlation
from causaldet.states import (
    bell_state,
    bloch_decompose,
    depolarize,
    random_correlation_blocks,
    random_state,
    werner_state,
)

GRID_101 = np.linspace(0.0, 1.0, 101)
CHECK_INDICES = range(0, 101, 10)  # the 11-point grid sits on the 101-point one

_CACHE: dict = {}


def _full_tables():
    if "tables" not in _CACHE:
        t0 = time.perf_counter()
        tables = boundary_tables((1, 2, 3), p_grid=GRID_101, restarts=64, seed=0)
        _CACHE["tables"] = (tables, time.perf_counter() - t0)
    return _CACHE["tables"]


def _passed(num: int, name: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {num} {name}: PASS{suffix}")


def test_criterion_1_direct_cause_constant():
    t0 = time.perf_counter()
    rng = make_rng(1)
    worst = 0.0
    for _ in range(1000):
        u = haar_random_unitary(rng)
        delta = exact_correlation(DirectCause(unitary_channel(u.u))).delta
        worst = max(worst, abs(delta - 1.0))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-9
    assert elapsed < 1.0
    _passed(1, "direct-cause determinant constant", f"worst |delta-1|={worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_common_cause_range():
    t0 = time.perf_counter()
    deltas = np.asarray(det3(random_correlation_blocks(100_000, make_rng(2))))
    assert deltas.min() >= -1.0 - 1e-9
    assert deltas.max() <= 1.0 / 27.0 + 1e-9
    # the vectorised ensemble is the object ensemble: cross-check a slice
    rng = make_rng(2)
    for i in range(200):
        m = bloch_decompose(random_state(rng)).m
        assert abs(det3(m) - deltas[i]) < 1e-12
    # endpoint witnesses, exact
    assert abs(exact_correlation(CommonCause(witness_singlet())).delta - (-1.0)) < 1e-12
    assert abs(exact_correlation(CommonCause(witness_werner_edge())).delta - 1.0 / 27.0) < 1e-12
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    _passed(
        2,
        "common-cause range",
        f"range [{deltas.min():.4f}, {deltas.max():.5f}], {elapsed:.1f}s",
    )


def test_criterion_3_werner_curve():
    eps = 0.048
    for omega in np.linspace(-1.0 / 3.0, 1.0, 50):
        delta = exact_correlation(CommonCause(werner_state(omega))).delta
        assert abs(delta - (-(omega**3))) <= 1e-12
        noisy = depolarize(werner_state(omega), eps)
        delta_noisy = exact_correlation(CommonCause(noisy)).delta
        assert abs(delta_noisy - (1 - eps) ** 3 * (-(omega**3))) <= 1e-12
    _passed(3, "werner determinant curve", "50 points, depolarized variant scales")


def test_criterion_4_mixed_unitary_ranges():
    d2 = random_mixture_deltas(2, 1.0, 100_000, make_rng(4))
    assert d2.min() >= -1e-9
    assert d2.max() <= 1.0 + 1e-9
    d3 = random_mixture_deltas(3, 1.0, 100_000, make_rng(5))
    assert d3.min() >= -1.0 / 27.0 - 1e-9
    assert d3.max() <= 1.0 + 1e-9
    w2 = exact_correlation(DirectCause(witness_half_identity_half_flip())).delta
    w3 = exact_correlation(DirectCause(witness_equal_pauli_flips())).delta
    assert abs(w2 - 0.0) < 1e-12
    assert abs(w3 - (-1.0 / 27.0)) < 1e-12
    _passed(
        4,
        "mixed-unitary ranges",
        f"N=2 in [{d2.min():.2e}, {d2.max():.5f}], N=3 in [{d3.min():.5f}, {d3.max():.5f}]",
    )


def test_criterion_5_boundary_endpoints():
    tables, elapsed = _full_tables()
    assert elapsed < 600.0
    for cls in (1, 2, 3):
        tb = tables[cls]
        assert tb.upper[0] == pytest.approx(1.0 / 27.0, abs=1e-3)
        assert tb.upper[-1] == pytest.approx(1.0, abs=1e-3)
    assert tables[3].lower[0] == pytest.approx(-1.0, abs=1e-3)
    assert tables[3].lower[-1] == pytest.approx(-1.0 / 27.0, abs=1e-3)
    for i in range(len(GRID_101)):
        assert tables[1].lower[i] >= tables[2].lower[i] - 1e-12
        assert tables[2].lower[i] >= tables[3].lower[i] - 1e-12
        assert tables[1].upper[i] <= tables[2].upper[i] + 1e-12
        assert tables[2].upper[i] <= tables[3].upper[i] + 1e-12
    _passed(5, "boundary endpoints and nesting", f"101x64 tables in {elapsed:.0f}s")


def test_criterion_6_oracle_containment():
    tables, _ = _full_tables()
    worst = 0.0
    for cls in (1, 2, 3):
        tb = tables[cls]
        for i in CHECK_INDICES:
            p = float(GRID_101[i])
            deltas = random_mixture_deltas(cls, p, 10_000, derive_rng(6, cls, i))
            worst = max(worst, float(deltas.max()) - tb.upper[i], tb.lower[i] - float(deltas.min()))
    assert worst <= 1e-6
    _passed(6, "oracle containment", f"worst overshoot {worst:.2e}")


def test_criterion_7_statistical_pipeline():
    singlet = CommonCause(bell_state(3))
    data = run_experiment(singlet, 100_000, 7)
    est, _ = estimate_correlation(data)
    assert abs(est.delta - (-1.0)) <= 0.03

    covered = 0
    for seed in range(100):
        run = run_experiment(singlet, 100_000, seed)
        _, (lo, hi) = bootstrap_delta(run, 1000, seed)
        covered += lo <= -1.0 <= hi
    assert covered >= 90

    # 1/sqrt(shots) interval scaling needs a scenario whose determinant
    # estimate is first order in the counting noise; the singlet is second
    # order (its same-axis correlations are exact), so a generic werner
    # scenario carries this check
    sc = CommonCause(werner_state(0.5))
    widths = {}
    for shots in (10_000, 40_000):
        ws = []
        for seed in range(20):
            run = run_experiment(sc, shots, 700 + seed)
            _, (lo, hi) = bootstrap_delta(run, 1000, 700 + seed)
            ws.append(hi - lo)
        widths[shots] = float(np.median(ws))
    ratio = widths[10_000] / widths[40_000]
    assert 2.0 * 0.7 <= ratio <= 2.0 * 1.3
    _passed(
        7,
        "statistical pipeline",
        f"|delta_hat+1|={abs(est.delta + 1):.1e}, coverage {covered}/100, width ratio {ratio:.2f}",
    )


def _random_channel(n: int, rng) -> MixedUnitaryChannel:
    us = haar_random_unitaries(n, rng)
    return MixedUnitaryChannel(rng.dirichlet(np.ones(n)), tuple(Unitary2(u) for u in us))


def test_criterion_8_inference_soundness():
    tables, _ = _full_tables()
    rng = make_rng(8)
    for case in range(500):
        cls = (1, 2, 3)[case % 3]
        kind = ("pure_dc", "pure_cc", "mixture")[(case // 3) % 3]
        channel = _random_channel(cls, rng)
        state = random_state(rng)
        if kind == "pure_dc":
            sc, true_p = DirectCause(channel), 1.0
        elif kind == "pure_cc":
            sc, true_p = CommonCause(state), 0.0
        else:
            true_p = float(rng.uniform(0.0, 1.0))
            sc = Mixture(true_p, channel, state)
        delta = exact_correlation(sc).delta
        rep = classify(float(np.clip(delta, -1.0, 1.0)))
        if kind == "pure_dc":
            assert rep.common_cause_present == UNDETERMINED
        if kind == "pure_cc":
            assert rep.direct_cause_present == UNDETERMINED
        interval = p_range(float(np.clip(delta, -1.0, 1.0)), cls, tables[cls])
        assert interval is not None, (case, kind, cls, delta)
        lo, hi = interval
        assert lo - 1e-12 <= true_p <= hi + 1e-12, (case, kind, cls, delta, true_p, interval)

    thr = 1.0 / 27.0
    assert classify(thr + 1e-9).direct_cause_present == YES
    assert classify(thr - 1e-9).direct_cause_present == UNDETERMINED
    assert classify(-thr - 1e-9).common_cause_present == YES
    assert classify(-thr + 1e-9).common_cause_present == UNDETERMINED
    assert classify(-thr - 1e-9).ndc_min_pure_dc == NOT_PURE_DC
    _passed(8, "inference soundness", "500 scenarios, thresholds sharp")


def test_criterion_9_structural_properties():
    rng = make_rng(9)
    # input-state independence, bitwise
    for n in (1, 2, 3):
        channel = _random_channel(n, rng)
        inputs = (
            np.diag([1.0, 0.0]).astype(complex),
            np.eye(2, dtype=complex) / 2.0,
            np.array([[0.65, 0.2 - 0.1j], [0.2 + 0.1j, 0.35]], dtype=complex),
        )
        results = [exact_correlation(DirectCause(channel, inp)).c for inp in inputs]
        assert np.array_equal(results[0], results[1])
        assert np.array_equal(results[0], results[2])

    # determinant invariance under independent local frame rotations
    worst = 0.0
    for _ in range(1000):
        c = random_correlation_blocks(1, rng)[0]
        r_a = rotations_of(haar_random_unitaries(1, rng))[0]
        r_b = rotations_of(haar_random_unitaries(1, rng))[0]
        worst = max(worst, abs(det3(r_a @ c @ r_b.T) - det3(c)))
    assert worst <= 1e-9

    # mixture linearity, entrywise
    for _ in range(100):
        p = float(rng.uniform(0, 1))
        channel = _random_channel(2, rng)
        state = random_state(rng)
        mixed = exact_correlation(Mixture(p, channel, state)).c
        direct = exact_correlation(DirectCause(channel)).c
        common = exact_correlation(CommonCause(state)).c
        assert np.max(np.abs(mixed - (p * direct + (1 - p) * common))) <= 1e-12
    _passed(9, "structural properties", f"frame-invariance worst {worst:.1e}")
