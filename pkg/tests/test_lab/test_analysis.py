"""
Tests for domination verdicts, the dominating fixtures and two-input mergers
"""

import itertools
import json

import numpy as np
import pytest

from pmerge_lab.analysis import (
    DiagonalCurve,
    LowerSetBoundary,
    Relation,
    diag_curve_merge,
    m_family_domination,
    m_scaled_domination,
    prime_counterexample,
    ucp_lower_set_k2,
    witness_grid,
)
from pmerge_lab.simulation import adversarial_permutation_model, validity_sweep
from pmerge_sdk.merging import bonferroni, grid_harmonic, parse_method, power_mean
from pmerge_sdk.models.base_models import CurveError, EmptySetError, MethodError, PVector, RangeError

LEVELS = [0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0]


class TestMFamilyDomination:

    def test_large_exponents_are_ordered(self):
        verdict = m_family_domination(2.0, 5.0, 3)
        assert verdict.relation == Relation.SECOND_DOMINATES.value
        assert len(verdict.witness) == 1

    def test_small_exponents_are_incomparable(self):
        verdict = m_family_domination(-1.0, 0.0, 3)
        assert verdict.relation == Relation.INCOMPARABLE.value
        assert len(verdict.witness) == 2

    def test_reversed_arguments(self):
        assert m_family_domination(5.0, 2.0, 3).relation == Relation.FIRST_DOMINATES.value

    @pytest.mark.parametrize("r,s,relation", [
        (1.0, 2.0, Relation.SECOND_DOMINATES),
        (-1.0, 0.5, Relation.FIRST_DOMINATES),
        (0.5, 3.0, Relation.INCOMPARABLE),
    ])
    def test_two_inputs(self, r, s, relation):
        assert m_family_domination(r, s, 2).relation == relation.value

    def test_witness_shows_the_gap(self):
        verdict = m_family_domination(1.0, 2.0, 2)
        p = np.array(verdict.witness[0])
        assert np.sqrt(2.0) * power_mean(p, 2.0) < 2.0 * power_mean(p, 1.0)

    def test_json(self):
        data = json.loads(m_family_domination(2.0, 5.0, 3).to_json())
        assert data["relation"] == "second_dominates"

    @pytest.mark.parametrize("r,s,K", [(1.0, 1.0, 3), (1.0, 2.0, 1)])
    def test_invalid(self, r, s, K):
        with pytest.raises(RangeError):
            m_family_domination(r, s, K)


class TestScaledDomination:

    def test_smaller_scale_dominates(self):
        verdict = m_scaled_domination(-1.0, 2.0, 1.0, 2.0, 2)
        assert verdict.relation == Relation.FIRST_DOMINATES.value

    def test_same_sign_exponents(self):
        verdict = m_scaled_domination(1.0, 2.0, 2.0, 1.0, 2)
        assert verdict.relation == Relation.SECOND_DOMINATES.value

    @pytest.mark.parametrize("a,b", [(3.0, 1.0), (10.0, 1.0), (1.5, 0.1)])
    def test_geometric_mean_never_dominates(self, a, b):
        verdict = m_scaled_domination(-1.0, a, 0.0, b, 4)
        assert verdict.relation != Relation.SECOND_DOMINATES.value

    @pytest.mark.parametrize("args", [
        (2.0, 1.0, 1.0, 1.0, 3),
        (-1.0, 0.0, 1.0, 1.0, 3),
        (-1.0, 1.0, 1.0, 1.0, 1),
    ])
    def test_invalid(self, args):
        with pytest.raises(RangeError):
            m_scaled_domination(*args)

    def test_witness_grid(self):
        small = witness_grid(2)
        assert any(np.array_equal(v, [1.0, 0.0]) for v in small)
        assert all(v.shape == (6,) for v in witness_grid(6))
        assert len(witness_grid(3)) > len(witness_grid(5))


class TestPrimeTwo:

    def test_value(self):
        assert prime_counterexample(2)([0.1, 0.5]) == pytest.approx(0.3)

    def test_dominates_grid_harmonic(self):
        f = prime_counterexample(2)
        gaps = []
        for p in itertools.product(LEVELS, repeat=2):
            gap = grid_harmonic(list(p)) - f(list(p))
            assert gap >= -1e-12
            gaps.append(gap)
        assert max(gaps) > 0.1

    def test_not_symmetric(self):
        f = prime_counterexample(2)
        assert f([0.5, 0.1]) != f([0.1, 0.5])


class TestPrimeThree:

    def test_witness(self):
        f = prime_counterexample(3)
        p = [5 / 22, 3 / 22, 1.0]
        assert f(p) <= 0.5
        assert grid_harmonic(p) == pytest.approx(0.625, abs=1e-12)

    def test_dominates_grid_harmonic(self):
        f = prime_counterexample(3)
        for p in itertools.product(LEVELS, repeat=3):
            assert f(list(p)) <= grid_harmonic(list(p)) + 1e-9

    def test_binary_search_agrees(self, random_pvectors):
        f = prime_counterexample(3)
        for p in random_pvectors(3, 20, power=1.0):
            assert f.merge_binary(p).p == pytest.approx(f(p), abs=1e-9)

    def test_calibrators_only_for_three(self):
        assert len(prime_counterexample(3).calibrators()) == 3
        with pytest.raises(RangeError):
            prime_counterexample(2).calibrators()

    @pytest.mark.parametrize("K", [1, 4, 5])
    def test_other_K(self, K):
        with pytest.raises(RangeError, match="K = 2 and K = 3"):
            prime_counterexample(K)

    def test_length_mismatch(self):
        with pytest.raises(RangeError):
            prime_counterexample(3)([0.1, 0.2])

    def test_zero_entry(self):
        assert prime_counterexample(3)([0.0, 0.5, 0.5]) == 0.0

    def test_valid_under_the_adversarial_model(self):
        report = validity_sweep(prime_counterexample(3), adversarial_permutation_model(3, 0.1, seed=5),
                                4000, threads=1)
        assert report.passes
        assert report.method == "prime-counterexample:K=3"


class TestLowerSets:

    @pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
    def test_anti_diagonal(self, t):
        assert ucp_lower_set_k2(LowerSetBoundary.anti_diagonal(t)) == pytest.approx(t)

    @pytest.mark.parametrize("a", [0.05, 0.4])
    def test_strip(self, a):
        assert ucp_lower_set_k2(LowerSetBoundary.rectangle(a)) == pytest.approx(a)

    def test_full_square(self):
        assert ucp_lower_set_k2(LowerSetBoundary.rectangle(1.0, 1.0)) == 1.0

    def test_staircase_from_points(self):
        boundary = [(0.0, 0.5), (0.2, 0.5), (0.2, 0.1), (0.6, 0.1), (0.6, 0.0)]
        assert ucp_lower_set_k2(boundary) == pytest.approx(0.3)

    def test_empty(self):
        with pytest.raises(EmptySetError):
            ucp_lower_set_k2([])

    def test_not_a_lower_set(self):
        with pytest.raises(CurveError):
            LowerSetBoundary([(0.0, 0.2), (0.1, 0.5)])


class TestDiagonalCurves:

    def test_identity_is_bonferroni(self):
        curve = DiagonalCurve.identity()
        for p1, p2 in itertools.product(LEVELS, repeat=2):
            assert curve.merge(p1, p2) == bonferroni([p1, p2])

    def test_jump(self):
        curve = DiagonalCurve.from_function([0.5], [0.2], [0.6])
        assert diag_curve_merge(curve, 0.5, 0.4) == pytest.approx(0.9)
        assert diag_curve_merge(curve, 0.1, 0.9) == pytest.approx(0.14)

    def test_origin_only(self):
        curve = DiagonalCurve([(0.0, 0.3), (0.5, 0.5)])
        assert diag_curve_merge(curve, 0.4, 0.0) == 0.0

    def test_method(self):
        method = DiagonalCurve.identity().method()
        assert method.name == "diag-curve"
        assert method(PVector([0.2, 0.3])) == pytest.approx(0.4)
        with pytest.raises(RangeError):
            method(PVector([0.2, 0.3, 0.4]))

    def test_valid_under_the_adversarial_model(self):
        curve = DiagonalCurve.from_function([0.5], [0.2], [0.6])
        report = validity_sweep(curve.method(), adversarial_permutation_model(2, 0.2, seed=3),
                                4000, threads=1)
        assert report.passes

    def test_decreasing_knots(self):
        with pytest.raises(CurveError):
            DiagonalCurve([(0.5, 0.5), (0.4, 0.6)])

    def test_jump_downwards(self):
        with pytest.raises(CurveError):
            DiagonalCurve.from_function([0.5], [0.6], [0.2])

    @pytest.mark.parametrize("p1,p2", [(1.2, 0.5), (0.5, -0.1)])
    def test_out_of_range(self, p1, p2):
        with pytest.raises(RangeError):
            diag_curve_merge(DiagonalCurve.identity(), p1, p2)


def test_diag_curve_is_not_parseable():
    with pytest.raises(MethodError):
        parse_method("diag-curve")
