"""Determinant ranges, boundary optimization, and the sampling oracle."""
import numpy as np
import pytest

from causaldet.bounds import (
    BoundaryTable,
    boundary_table,
    boundary_tables,
    empirical_range,
    optimize_boundary,
    random_mixture_deltas,
    theoretical_range,
    witness_equal_pauli_flips,
    witness_half_identity_half_flip,
    witness_identity,
    witness_singlet,
    witness_werner_edge,
)
from causaldet.channels import MixedUnitaryChannel, Unitary2, haar_random_unitaries
from causaldet.rng import derive_rng, make_rng
from causaldet.scenarios import CommonCause, DirectCause, exact_correlation

GRID = np.linspace(0.0, 1.0, 11)


@pytest.fixture(scope="module")
def tables():
    return boundary_tables((1, 2, 3), p_grid=GRID, restarts=8, seed=0)


class TestTheoreticalRange:
    def test_single_unitary(self):
        r = theoretical_range("dc", 1)
        assert (r.lo, r.hi) == (1.0, 1.0)

    def test_two_unitaries(self):
        r = theoretical_range("dc", 2)
        assert (r.lo, r.hi) == (0.0, 1.0)

    def test_three_or_more(self):
        for n in (3, 4, 9):
            r = theoretical_range("dc", n)
            assert r.lo == pytest.approx(-1 / 27)
            assert r.hi == 1.0

    def test_common_cause(self):
        r = theoretical_range("cc")
        assert r.lo == -1.0
        assert r.hi == pytest.approx(1 / 27)

    def test_rejects_bad_count(self):
        with pytest.raises(ValueError):
            theoretical_range("dc", 0)

    def test_rejects_bad_kind(self):
        with pytest.raises(ValueError):
            theoretical_range("direct")


class TestWitnessExactness:
    def test_identity_channel(self):
        d = exact_correlation(DirectCause(witness_identity())).delta
        assert abs(d - 1.0) < 1e-12

    def test_half_half_channel(self):
        d = exact_correlation(DirectCause(witness_half_identity_half_flip())).delta
        assert abs(d - 0.0) < 1e-12

    def test_equal_flips_channel(self):
        d = exact_correlation(DirectCause(witness_equal_pauli_flips())).delta
        assert abs(d - (-1 / 27)) < 1e-12

    def test_singlet(self):
        d = exact_correlation(CommonCause(witness_singlet())).delta
        assert abs(d - (-1.0)) < 1e-12

    def test_werner_edge(self):
        d = exact_correlation(CommonCause(witness_werner_edge())).delta
        assert abs(d - 1 / 27) < 1e-12


class TestSearchParametrization:
    def test_vertex_logits_reach_the_tetrahedron_corners(self):
        # at p = 0 the objective reduces to the product of the diagonal block;
        # saturating one barycentric logit must land on the matching vertex
        from causaldet.bounds import TETRA_VERTICES, _mixture_det, _VERTEX_LOGITS

        for vertex, logits in zip(TETRA_VERTICES, _VERTEX_LOGITS):
            x = [0.0, 0.0, 0.0] + list(logits)
            expected = vertex[0] * vertex[1] * vertex[2]
            assert _mixture_det(x, 1, 0.0) == pytest.approx(expected, abs=1e-9)


class TestOptimizeBoundary:
    @pytest.mark.parametrize("ndc", [1, 2, 3])
    def test_pure_direct_max(self, ndc):
        v = optimize_boundary(ndc, 1.0, "max", restarts=4, rng=make_rng(0))
        assert v == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.parametrize("ndc", [1, 2, 3])
    def test_pure_common_max(self, ndc):
        v = optimize_boundary(ndc, 0.0, "max", restarts=4, rng=make_rng(0))
        assert v == pytest.approx(1 / 27, abs=1e-3)

    def test_pure_common_min(self):
        v = optimize_boundary(3, 0.0, "min", restarts=4, rng=make_rng(0))
        assert v == pytest.approx(-1.0, abs=1e-3)

    def test_pure_direct_min_three_terms(self):
        v = optimize_boundary(3, 1.0, "min", restarts=4, rng=make_rng(0))
        assert v == pytest.approx(-1 / 27, abs=1e-3)

    def test_pure_direct_min_two_terms(self):
        v = optimize_boundary(2, 1.0, "min", restarts=4, rng=make_rng(0))
        assert v == pytest.approx(0.0, abs=1e-3)

    def test_single_class_constant_at_pure_direct(self):
        lo = optimize_boundary(1, 1.0, "min", restarts=2, rng=make_rng(1))
        hi = optimize_boundary(1, 1.0, "max", restarts=2, rng=make_rng(1))
        assert lo == pytest.approx(1.0, abs=1e-9)
        assert hi == pytest.approx(1.0, abs=1e-9)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            optimize_boundary(3, 1.5, "max")
        with pytest.raises(ValueError):
            optimize_boundary(3, 0.5, "upward")
        with pytest.raises(ValueError):
            optimize_boundary(5, 0.5, "max")


class TestBoundaryTables:
    def test_endpoint_invariants(self, tables):
        for cls in (1, 2, 3):
            tb = tables[cls]
            assert tb.upper[0] == pytest.approx(1 / 27, abs=1e-3)
            assert tb.upper[-1] == pytest.approx(1.0, abs=1e-3)
            assert tb.lower[0] == pytest.approx(-1.0, abs=1e-3)
        assert tables[3].lower[-1] == pytest.approx(-1 / 27, abs=1e-3)
        assert tables[2].lower[-1] == pytest.approx(0.0, abs=1e-3)
        assert tables[1].lower[-1] == pytest.approx(1.0, abs=1e-3)

    def test_monotone_nesting(self, tables):
        for i in range(len(GRID)):
            assert tables[1].lower[i] >= tables[2].lower[i] - 1e-12
            assert tables[2].lower[i] >= tables[3].lower[i] - 1e-12
            assert tables[1].upper[i] <= tables[2].upper[i] + 1e-12
            assert tables[2].upper[i] <= tables[3].upper[i] + 1e-12

    def test_oracle_containment(self, tables):
        for cls in (1, 2, 3):
            tb = tables[cls]
            for i, p in enumerate(GRID):
                r = empirical_range(cls, float(p), 2000, derive_rng(3, cls, i))
                assert r.lo >= tb.lower[i] - 1e-6
                assert r.hi <= tb.upper[i] + 1e-6

    def test_single_class_helper_matches(self, tables):
        tb = boundary_table(1, p_grid=GRID, restarts=8, seed=0)
        assert np.allclose(tb.upper, tables[1].upper, atol=1e-12)
        assert np.allclose(tb.lower, tables[1].lower, atol=1e-12)

    def test_interval_interpolation(self, tables):
        tb = tables[3]
        lo, hi = tb.interval_at(float(GRID[4]))
        assert lo == pytest.approx(tb.lower[4])
        assert hi == pytest.approx(tb.upper[4])
        mid_lo, mid_hi = tb.interval_at(0.5 * (GRID[4] + GRID[5]))
        assert mid_lo == pytest.approx(0.5 * (tb.lower[4] + tb.lower[5]))
        assert mid_hi == pytest.approx(0.5 * (tb.upper[4] + tb.upper[5]))
        with pytest.raises(ValueError):
            tb.interval_at(1.5)


class TestBoundaryTableType:
    def test_rejects_descending_grid(self):
        with pytest.raises(ValueError):
            BoundaryTable(1, np.array([1.0, 0.0]), np.zeros(2), np.ones(2), 1, 1e-9, 0)

    def test_rejects_crossed_curves(self):
        with pytest.raises(ValueError):
            BoundaryTable(1, np.array([0.0, 1.0]), np.ones(2), np.zeros(2), 1, 1e-9, 0)


class TestEmpiricalRange:
    def test_single_unitary_pure_direct(self):
        r = empirical_range(1, 1.0, 500, make_rng(0))
        assert r.lo == pytest.approx(1.0, abs=1e-9)
        assert r.hi == pytest.approx(1.0, abs=1e-9)

    def test_two_term_channels_in_range(self):
        r = empirical_range(2, 1.0, 20_000, make_rng(1))
        assert r.lo >= -1e-9
        assert r.hi <= 1.0 + 1e-9

    def test_deterministic(self):
        d1 = random_mixture_deltas(3, 0.4, 100, make_rng(5))
        d2 = random_mixture_deltas(3, 0.4, 100, make_rng(5))
        assert np.array_equal(d1, d2)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            random_mixture_deltas(3, 0.5, 0, make_rng(0))
        with pytest.raises(ValueError):
            random_mixture_deltas(3, 1.5, 10, make_rng(0))


class TestExtraTermsDoNotExtend:
    def test_four_and_five_term_channels_stay_inside(self, tables):
        # the class-3 search fixes three terms; more terms must not escape
        rng = make_rng(17)
        lo3, hi3 = tables[3].lower[-1], tables[3].upper[-1]
        for n in (4, 5):
            for _ in range(2000):
                us = haar_random_unitaries(n, rng)
                w = rng.dirichlet(np.ones(n))
                ch = MixedUnitaryChannel(w, tuple(Unitary2(u) for u in us))
                d = exact_correlation(DirectCause(ch)).delta
                assert lo3 - 1e-6 <= d <= hi3 + 1e-6
