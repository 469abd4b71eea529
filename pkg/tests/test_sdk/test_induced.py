import math

import numpy as np
import pytest

from pmerge_sdk.calibrators import grid_harmonic_calibrator, mstar_calibrator, o_family_calibrator
from pmerge_sdk.merging import (
    InducedMerge,
    bonferroni,
    gamma_K,
    grid_harmonic,
    grid_harmonic_exact,
    hommel,
    m_family,
    m_star,
    m_star_equivalence_check,
    merge_induced,
    merge_weighted_induced,
    solve_m_coefficients,
)
from pmerge_sdk.merging.induced import rejection_score
from pmerge_sdk.models.base_models import LengthError, RangeError, WeightVector

TIGHT = math.ldexp(1.0, -52) + 1e-12


class TestMergeInduced:

    def test_grid_harmonic_matches_hommel_for_three_inputs(self):
        result = merge_induced([0.01, 0.04, 0.9], InducedMerge(grid_harmonic_calibrator(3), 3))
        assert result.p == pytest.approx(0.055, abs=TIGHT)
        assert result.accuracy_bound == math.ldexp(1.0, -52)

    def test_zero_entry(self):
        result = merge_induced([0.0, 0.5, 0.5], InducedMerge(grid_harmonic_calibrator(3), 3))
        assert result.p == 0.0
        assert result.accuracy_bound == 0.0

    def test_o_family_calibrator_gives_bonferroni(self, random_pvectors):
        im = InducedMerge(o_family_calibrator(1, 4, admissible=True), 4)
        for p in random_pvectors(4, 50):
            assert merge_induced(p, im).p == pytest.approx(bonferroni(p), abs=TIGHT)

    def test_returns_the_upper_end(self):
        p = [0.01, 0.04, 0.9]
        coarse = merge_induced(p, InducedMerge(grid_harmonic_calibrator(3), 3, M=8))
        assert coarse.accuracy_bound == 2 ** -8
        assert grid_harmonic_exact(p) <= coarse.p <= grid_harmonic_exact(p) + 2 ** -8

    def test_arity_mismatch(self):
        with pytest.raises(LengthError):
            merge_induced([0.1, 0.2], InducedMerge(grid_harmonic_calibrator(3), 3))
        with pytest.raises(RangeError):
            InducedMerge(grid_harmonic_calibrator(3), 4)
        with pytest.raises(RangeError):
            InducedMerge(grid_harmonic_calibrator(3), 3, M=0)

    @pytest.mark.parametrize("K", [3, 5, 12])
    def test_matches_exact_grid_harmonic(self, K, random_pvectors):
        im = InducedMerge(grid_harmonic_calibrator(K), K)
        for p in random_pvectors(K, 200):
            assert merge_induced(p, im).p == pytest.approx(grid_harmonic_exact(p), abs=TIGHT)

    @pytest.mark.parametrize("K", [3, 5, 10])
    @pytest.mark.parametrize("r", [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0])
    def test_matches_closed_form_mstar(self, r, K, random_pvectors):
        coeffs = solve_m_coefficients(r, K)
        im = InducedMerge(mstar_calibrator(r, K, coeffs), K)
        for p in random_pvectors(K, 30):
            expected = m_star(p, r, coeffs)
            assert merge_induced(p, im).p == pytest.approx(expected, abs=math.ldexp(1.0, -52) + 1e-9)

    def test_rejection_score_monotone_in_eps(self, random_pvectors):
        f = grid_harmonic_calibrator(6)
        grid = np.linspace(0.001, 1.0, 400)
        for p in random_pvectors(6, 20):
            scores = [rejection_score(f, p, eps) for eps in grid]
            assert all(a <= b for a, b in zip(scores, scores[1:]))


class TestWeightedInduced:

    def test_uniform_weights_match_symmetric_merge(self, random_pvectors):
        f = grid_harmonic_calibrator(4)
        im = InducedMerge(f, 4)
        for p in random_pvectors(4, 30):
            weighted = merge_weighted_induced(p, [f] * 4, WeightVector.uniform(4))
            assert weighted.p == pytest.approx(merge_induced(p, im).p, abs=TIGHT)

    def test_weights_shift_the_merge(self):
        f = o_family_calibrator(1, 2, admissible=True)
        w = WeightVector.from_sequence([1.0, 0.0])
        # only the first entry counts: rejects once 0.2/eps <= 1/2
        assert merge_weighted_induced([0.2, 0.01], [f, f], w).p == pytest.approx(0.4, abs=TIGHT)

    def test_needs_one_calibrator_per_entry(self):
        with pytest.raises(LengthError):
            merge_weighted_induced([0.1, 0.2, 0.3], [grid_harmonic_calibrator(3)] * 2)


class TestGridHarmonicExact:

    def test_three_inputs(self):
        assert grid_harmonic_exact([0.01, 0.04, 0.9]) == pytest.approx(0.055, rel=1e-12)

    def test_four_input_ratio_witness(self):
        p = 0.01 * np.arange(1, 5)
        assert grid_harmonic_exact(p) == pytest.approx(0.0625, rel=1e-12)
        assert hommel(p) == pytest.approx(1 / 12, rel=1e-12)

    def test_all_ones(self):
        assert grid_harmonic_exact([1.0] * 5) == 1.0

    def test_zero_entry(self):
        assert grid_harmonic_exact([0.0, 0.3, 0.3]) == 0.0

    def test_large_K_uses_binary_search(self, rng):
        p = rng.uniform(size=600) ** 4
        assert grid_harmonic(p) == pytest.approx(grid_harmonic_exact(p), abs=TIGHT)

    @pytest.mark.parametrize("K", [2, 3, 4, 5, 8, 13])
    def test_dominates_hommel(self, K, random_pvectors):
        for p in random_pvectors(K, 200):
            assert grid_harmonic_exact(p) <= hommel(p) + 1e-12

    @pytest.mark.parametrize("K", [2, 3])
    def test_equals_hommel_for_few_inputs(self, K, random_pvectors):
        for p in random_pvectors(K, 200):
            assert grid_harmonic_exact(p) == pytest.approx(hommel(p), rel=1e-12)

    @pytest.mark.parametrize("K", [4, 6, 10])
    def test_strict_on_the_arithmetic_grid(self, K):
        p = 0.001 * np.arange(1, K + 1)
        assert grid_harmonic_exact(p) < hommel(p) - 1e-12

    @pytest.mark.parametrize("K", [3, 4, 6, 10])
    def test_improvement_bounded_by_gamma(self, K, random_pvectors):
        gamma = gamma_K(K)
        for p in random_pvectors(K, 200):
            assert grid_harmonic_exact(p) >= gamma * hommel(p) - 1e-12
        alpha = 0.5 / (K * sum(1 / k for k in range(1, K + 1)))
        grid = alpha * np.arange(1, K + 1)
        assert grid_harmonic_exact(grid) == pytest.approx(gamma * hommel(grid), rel=1e-12)


class TestMStar:

    @pytest.mark.parametrize("r", [-1.0, 0.0, 0.5])
    def test_dominates_the_m_family(self, r, random_pvectors):
        coeffs = solve_m_coefficients(r, 3)
        values = [(m_star(p, r, coeffs), m_family(p, r, coeffs)) for p in random_pvectors(3, 500)]
        assert all(star <= plain + 1e-12 for star, plain in values)
        assert any(star < plain - 1e-9 for star, plain in values)

    def test_full_set_term_reproduces_the_m_family(self):
        coeffs = solve_m_coefficients(-1, 4)
        p = 0.01 * np.array([coeffs.c_r, coeffs.d_r, coeffs.d_r, coeffs.d_r])
        assert m_star(p, -1, coeffs) == pytest.approx(m_family(p, -1, coeffs), rel=1e-12)

    def test_zero_entry(self):
        assert m_star([0.0, 0.5, 0.5], -1) == 0.0

    def test_too_few_inputs(self):
        with pytest.raises(RangeError, match="K >= 3"):
            m_star([0.1, 0.2], -1)

    def test_exponent_at_or_above_K_minus_one(self):
        with pytest.raises(RangeError, match="K-1"):
            m_star([0.1, 0.2, 0.3], 2)

    def test_permutation_invariant(self, rng):
        p = rng.uniform(size=7) ** 3
        assert m_star(p, -1) == m_star(rng.permutation(p), -1)


class TestMStarEquivalence:

    def test_at_the_merged_value(self, random_pvectors):
        coeffs = solve_m_coefficients(-1, 5)
        for p in random_pvectors(5, 100, power=5):
            value = m_star(p, -1, coeffs)
            if value + 1e-9 < 1.0:
                assert m_star_equivalence_check(p, -1, value + 1e-9, coeffs)
            if value - 1e-9 > 0.0:
                assert m_star_equivalence_check(p, -1, value - 1e-9, coeffs)

    def test_zero_entry(self):
        assert m_star_equivalence_check([0.0, 0.5, 0.9, 0.9, 0.9], -1, 0.01)

    @pytest.mark.parametrize("eps", [0.0, 1.0, 1.5])
    def test_eps_range(self, eps):
        with pytest.raises(RangeError):
            m_star_equivalence_check([0.1, 0.2, 0.3], -1, eps)
