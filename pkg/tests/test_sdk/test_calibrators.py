import math

import numpy as np
import pytest

from pmerge_sdk.calibrators import (
    ConvexityClass,
    StepCalibrator,
    arithmetic_calibrator_k2,
    calibrator_from_spec,
    check_admissibility_condition,
    grid_harmonic_calibrator,
    mstar_calibrator,
    naive_detour_merge,
    o_family_calibrator,
    p_to_e_merge,
    parse_calibrator_spec,
    transformed_calibrator,
)
from pmerge_sdk.merging import InducedMerge, merge_induced, solve_m_coefficients
from pmerge_sdk.models.base_models import LengthError, MethodError, RangeError, WeightVector


def _all_calibrators():
    return [
        grid_harmonic_calibrator(3),
        grid_harmonic_calibrator(12),
        mstar_calibrator(-1, 3),
        mstar_calibrator(-2, 5),
        mstar_calibrator(0, 4),
        mstar_calibrator(0.5, 3),
        mstar_calibrator(1.5, 4),
        o_family_calibrator(2, 5),
        o_family_calibrator(1, 3, admissible=True),
        arithmetic_calibrator_k2(),
        transformed_calibrator(mstar_calibrator(-1, 3), 0.1, 3),
    ]


class TestGridHarmonicCalibrator:

    @pytest.mark.parametrize("x,expected", [(2 / 11, 3.0), (4 / 11, 1.5), (6 / 11, 1.0), (0.6, 0.0)])
    def test_three_inputs(self, x, expected):
        assert grid_harmonic_calibrator(3)(x) == expected

    def test_value_at_zero(self):
        assert grid_harmonic_calibrator(5)(0.0) == math.inf

    def test_integrates_to_one(self):
        f = grid_harmonic_calibrator(100)
        assert f.integral_on_unit == pytest.approx(1.0, abs=1e-12)
        assert f.admissible

    def test_vectorized_evaluation(self):
        f = grid_harmonic_calibrator(3)
        np.testing.assert_array_equal(f(np.array([0.0, 2 / 11, 0.5, 2.0])), [math.inf, 3.0, 1.0, 0.0])


class TestMStarCalibrator:

    def test_zero_beyond_d(self):
        f = mstar_calibrator(-1, 3)
        d = f.coeffs.d_r
        assert f(d) == pytest.approx(0.0, abs=1e-12)
        assert f(0.5 * (d + 1)) == 0.0

    def test_plateau_up_to_c(self):
        f = mstar_calibrator(-1, 3)
        c = f.coeffs.c_r
        assert f(c) == 3.0
        assert f(0.5 * c) == 3.0
        assert f(0.0) == math.inf

    @pytest.mark.parametrize("r,K", [(-1, 3), (-2, 5), (-0.5, 10), (0, 3), (0.5, 3), (1, 3), (2, 5)])
    def test_integrates_to_one(self, r, K):
        assert mstar_calibrator(r, K).integral_on_unit == pytest.approx(1.0, abs=1e-9)

    def test_convexity_classes(self):
        assert mstar_calibrator(-1, 3).convexity_class == ConvexityClass.STRICTLY_CONVEX
        assert mstar_calibrator(0.7, 3).convexity_class == ConvexityClass.STRICTLY_CONVEX
        assert mstar_calibrator(1, 3).convexity_class == ConvexityClass.OTHER
        assert mstar_calibrator(1.5, 3).convexity_class == ConvexityClass.STRICTLY_CONCAVE

    def test_exponent_out_of_range(self):
        with pytest.raises(RangeError, match="K-1"):
            mstar_calibrator(2, 3)

    def test_too_few_inputs(self):
        with pytest.raises(RangeError, match="K >= 3"):
            mstar_calibrator(-1, 2)

    def test_mismatched_coefficients(self):
        with pytest.raises(RangeError):
            mstar_calibrator(-1, 3, solve_m_coefficients(-1, 4))


class TestCalibratorInvariants:

    @pytest.mark.parametrize("f", _all_calibrators(), ids=lambda f: f.name)
    def test_decreasing_and_vanishing_beyond_one(self, f):
        assert f.is_decreasing()
        assert np.all(f(np.linspace(1.0 + 1e-9, 2.0, 100)) == 0.0)

    @pytest.mark.parametrize("f", _all_calibrators(), ids=lambda f: f.name)
    def test_integral_at_most_one(self, f):
        assert 0.0 <= f.integral_on_unit <= 1.0 + 1e-9

    @pytest.mark.parametrize("f", _all_calibrators(), ids=lambda f: f.name)
    def test_admissible_ones_integrate_to_one(self, f):
        if f.admissible:
            assert f(0.0) == math.inf
            assert f.integral_on_unit == pytest.approx(1.0, abs=1e-9)

    def test_transform_keeps_a_calibrator(self):
        g = transformed_calibrator(mstar_calibrator(-1, 3), 0.1, 3)
        assert g(0.05) == 3.0
        assert g.integral_on_unit == pytest.approx(0.3 + 0.7 * 1.0, abs=1e-8)

    def test_transform_eta_range(self):
        with pytest.raises(RangeError):
            transformed_calibrator(grid_harmonic_calibrator(3), 0.5, 3)

    def test_step_calibrator_validation(self):
        with pytest.raises(RangeError):
            StepCalibrator("bad", 2, [0.5, 0.4], [2.0, 1.0])
        with pytest.raises(RangeError):
            StepCalibrator("bad", 2, [0.4, 0.5], [1.0, 2.0])


class TestSpecStrings:

    def test_parse(self):
        assert parse_calibrator_spec("grid-harmonic") == ("grid-harmonic", None)
        assert parse_calibrator_spec("mstar:r=-1") == ("mstar", -1.0)
        assert parse_calibrator_spec("o:k=2") == ("o", 2)

    @pytest.mark.parametrize("spec", ["unknown", "mstar:r=abc", "o:k=1.5", "mstar:r=nan"])
    def test_parse_errors(self, spec):
        with pytest.raises(MethodError):
            parse_calibrator_spec(spec)

    def test_o_spec_builds_the_admissible_version(self):
        f = calibrator_from_spec("o:k=2", 4)
        assert f(0.0) == math.inf
        assert f(0.5) == 2.0
        assert f(0.51) == 0.0

    def test_o_spec_with_finite_value_at_zero(self):
        assert parse_calibrator_spec("o:k=2:f0=K") == ("o-plain", 2)
        f = calibrator_from_spec("o:k=2:f0=K", 4)
        assert f(0.0) == 4.0
        assert not f.admissible
        assert f(0.5) == 2.0
        assert f(0.51) == 0.0

    def test_value_at_zero_does_not_change_the_merge(self):
        p = [0.0, 0.3, 0.6, 0.9]
        admissible = merge_induced(p, InducedMerge(calibrator_from_spec("o:k=2", 4), 4, 40))
        plain = merge_induced(p, InducedMerge(calibrator_from_spec("o:k=2:f0=K", 4), 4, 40))
        assert admissible.p == plain.p == 0.0


class TestAdmissibilityCondition:

    def test_harmonic_mstar_satisfied(self):
        f = mstar_calibrator(-1, 3)
        report = check_admissibility_condition(f, 3)
        assert report.satisfied
        assert report.witnesses == []
        assert report.eta == f.coeffs.c_r

    def test_grid_harmonic_not_satisfied(self):
        report = check_admissibility_condition(grid_harmonic_calibrator(12), 12)
        assert not report.satisfied
        assert any(w.startswith("shape") for w in report.witnesses)

    def test_linear_segment_not_satisfied(self):
        report = check_admissibility_condition(mstar_calibrator(1, 3), 3)
        assert not report.satisfied
        assert len(report.witnesses) == 1

    @pytest.mark.parametrize("r,K", [(-2, 5), (0, 4), (0.5, 3), (1.5, 4)])
    def test_other_mstar_exponents_satisfied(self, r, K):
        assert check_admissibility_condition(mstar_calibrator(r, K)).satisfied

    def test_report_serializes(self):
        data = check_admissibility_condition(mstar_calibrator(-1, 3)).to_dict()
        assert data["satisfied"] is True
        assert data["calibrator"] == "mstar:r=-1"


class TestPToEMerging:

    def test_grid_harmonic_at_the_first_step(self):
        f = grid_harmonic_calibrator(3)
        assert p_to_e_merge([2 / 11] * 3, f) == pytest.approx(3.0)
        assert naive_detour_merge([2 / 11] * 3, f) == pytest.approx(1 / 3)

    def test_zero_with_admissible_calibrator(self):
        f = grid_harmonic_calibrator(2)
        assert p_to_e_merge([0.0, 0.9], f) == math.inf
        assert naive_detour_merge([0.0, 0.9], f) == 0.0

    def test_zero_weight_drops_the_infinite_term(self):
        f = grid_harmonic_calibrator(2)
        w = WeightVector.from_sequence([0.0, 1.0])
        assert p_to_e_merge([0.0, 0.9], f, w) == 0.0

    def test_all_above_one(self):
        assert p_to_e_merge([1.5, 2.0, 3.0], grid_harmonic_calibrator(3)) == 0.0

    def test_detour_capped_at_one(self):
        f = o_family_calibrator(1, 2)
        w = WeightVector.from_sequence([0.25, 0.75])
        assert p_to_e_merge([0.3, 0.9], f, w) == pytest.approx(0.5)
        assert naive_detour_merge([0.3, 0.9], f, w) == 1.0

    def test_per_entry_calibrators(self):
        fs = [o_family_calibrator(1, 2), arithmetic_calibrator_k2()]
        assert p_to_e_merge([0.4, 0.5], fs) == pytest.approx(0.5 * 2.0 + 0.5 * 1.0)

    def test_length_mismatch(self):
        with pytest.raises(LengthError):
            p_to_e_merge([0.1, 0.2, 0.3], [grid_harmonic_calibrator(3)] * 2)
        with pytest.raises(LengthError):
            p_to_e_merge([0.1, 0.2, 0.3], grid_harmonic_calibrator(3), WeightVector.uniform(2))

    def test_rejection_region_form(self, random_pvectors):
        f = grid_harmonic_calibrator(5)
        im = InducedMerge(f, 5, 52)
        for p in random_pvectors(5, 100):
            eps = merge_induced(p, im).p
            if eps < 1.0:
                assert p_to_e_merge(p / eps, f) >= 1.0 - 1e-12
