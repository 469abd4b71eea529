import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from pmerge_sdk.merging import MergeMethod, MethodTag, parse_method, simes
from pmerge_sdk.merging.methods import format_real
from pmerge_sdk.models.base_models import MethodError, RangeError

SYMMETRIC_METHODS = [
    "bonferroni",
    "hommel",
    "o:k=2",
    "o-star:k=3",
    "m:r=-1",
    "m:r=0",
    "m:r=2",
    "m:r=inf",
    "m-star:r=-1",
    "m-star:r=0.5",
    "grid-harmonic",
    "induced:mstar:r=-2",
    "induced:mstar:r=-1",
    "induced:grid-harmonic:M=40",
]


def _fits(text, K):
    """Whether a method string accepts K inputs"""
    if text.startswith(("o-star:k=3", "m-star", "induced:mstar")):
        return K >= 3
    return True


class TestParseMethod:

    @pytest.mark.parametrize("text", [
        "bonferroni", "simes", "hommel", "grid-harmonic", "o:k=2", "o-star:k=1",
        "m:r=-1", "m:r=0.5", "m:r=inf", "m:r=-inf", "m-star:r=-1",
        "induced:mstar:r=-1", "induced:o:k=2:M=30", "induced:o:k=2:f0=K:M=30",
    ])
    def test_name_round_trip(self, text):
        assert parse_method(text).name == text

    def test_integral_exponents_print_without_decimals(self):
        assert parse_method("m:r=-1.0").name == "m:r=-1"

    def test_induced_depth(self):
        method = parse_method("induced:grid-harmonic:M=30")
        assert method.tag == MethodTag.INDUCED
        assert method.depth == 30
        assert method.calibrator_spec == "grid-harmonic"

    @pytest.mark.parametrize("text", ["fisher", "m:r=abc", "m:r=nan", "o:k=x", "induced:bogus", ""])
    def test_unknown_or_unparseable(self, text):
        with pytest.raises(MethodError):
            parse_method(text)

    def test_parameter_ranges(self):
        with pytest.raises(RangeError):
            parse_method("o:k=0")
        with pytest.raises(RangeError):
            parse_method("m-star:r=inf")
        with pytest.raises(RangeError):
            parse_method("induced:grid-harmonic:M=0")

    def test_method_errors_exit_with_three(self):
        with pytest.raises(MethodError) as excinfo:
            parse_method("nope")
        assert excinfo.value.exit_code == 3


class TestFormatReal:

    @pytest.mark.parametrize("value,text", [
        (2.0, "2"), (-1.0, "-1"), (0.5, "0.5"), (math.inf, "inf"), (-math.inf, "-inf"), (0.0, "0"),
    ])
    def test_format(self, value, text):
        assert format_real(value) == text

    def test_shortest_round_trip(self):
        assert float(format_real(0.1 + 0.2)) == 0.1 + 0.2


class TestMergeMethod:

    def test_hommel(self):
        result = parse_method("hommel").merge([0.01, 0.04, 0.9])
        assert result.p == pytest.approx(0.055)
        assert result.method_tag == "hommel"
        assert result.accuracy_bound == 0.0

    def test_induced_accuracy(self):
        result = parse_method("induced:mstar:r=-1:M=20").merge([0.01, 0.04, 0.9])
        assert result.accuracy_bound == 2 ** -20

    def test_only_simes_is_not_universally_valid(self):
        assert not parse_method("simes").universally_valid
        assert all(parse_method(m).universally_valid for m in SYMMETRIC_METHODS)

    def test_inputs_above_one_are_clipped(self):
        assert parse_method("m:r=inf")([0.3, 2.0]) == 1.0

    def test_order_statistic_beyond_K(self):
        with pytest.raises(RangeError):
            parse_method("o:k=3")([0.1, 0.2])

    def test_calibrator_only_for_induced_methods(self):
        assert parse_method("grid-harmonic").calibrator(4).K == 4
        with pytest.raises(MethodError):
            parse_method("hommel").calibrator(4)

    @pytest.mark.parametrize("text", ["grid-harmonic", "induced:mstar:r=-1"])
    def test_calibrator_built_once_across_threads(self, text):
        method = parse_method(text)
        with ThreadPoolExecutor(max_workers=8) as pool:
            built = list(pool.map(lambda _: method.calibrator(50), range(64)))
        assert all(f is built[0] for f in built)
        assert method.calibrator(50) is built[0]

    def test_diagonal_curve_needs_a_curve(self):
        with pytest.raises(MethodError):
            MergeMethod.diag_curve(object())

    @pytest.mark.parametrize("text", ["grid-harmonic", "hommel", "induced:mstar:r=-1"])
    def test_rejects_agrees_with_merge(self, text, random_pvectors):
        method = parse_method(text)
        for p in random_pvectors(5, 50):
            value = method(p)
            assert method.rejects(p, min(value * (1 + 1e-9), 1.0))
            if value > 1e-6:
                assert not method.rejects(p, value * (1 - 1e-6))


class TestLibraryProperties:

    @pytest.mark.parametrize("K", [2, 3, 5, 10])
    @pytest.mark.parametrize("text", SYMMETRIC_METHODS)
    def test_never_below_simes(self, text, K, random_pvectors):
        if not _fits(text, K):
            pytest.skip(f"{text} needs more than {K} inputs")
        method = parse_method(text)
        count = 500 if text.startswith("induced") else 10_000
        for p in random_pvectors(K, count):
            assert method(p) >= simes(p) - 1e-12

    @pytest.mark.parametrize("r", [-2.0, -1.0, 0.0, 0.5])
    def test_two_input_m_family_stays_above_bonferroni(self, r, random_pvectors):
        for p in random_pvectors(2, 2000):
            assert parse_method(f"m:r={r}")(p) >= simes(p) - 1e-12
            assert parse_method(f"m:r={r}")(p) >= parse_method("bonferroni")(p) - 1e-12

    @pytest.mark.parametrize("text", SYMMETRIC_METHODS)
    def test_symmetric(self, text, rng):
        method = parse_method(text)
        p = rng.uniform(size=6) ** 3
        for _ in range(5):
            assert method(rng.permutation(p)) == method(p)

    @pytest.mark.parametrize("text", SYMMETRIC_METHODS)
    def test_monotone(self, text, rng):
        method = parse_method(text)
        for _ in range(100):
            p = rng.uniform(size=5) ** 3
            q = np.minimum(p + rng.uniform(size=5) * 0.05, 1.0)
            assert method(p) <= method(q) + 1e-12

    @pytest.mark.parametrize("text", [m for m in SYMMETRIC_METHODS if not m.startswith("induced")])
    def test_homogeneous(self, text, rng):
        method = parse_method(text)
        for _ in range(50):
            p = rng.uniform(size=5) ** 4
            if method(p) >= 1.0:
                continue
            lam = rng.uniform(0.05, 1.0)
            assert abs(method(lam * p) - lam * method(p)) <= 1e-12

    @pytest.mark.parametrize("text", SYMMETRIC_METHODS + ["simes"])
    def test_results_in_unit_interval(self, text, random_pvectors):
        method = parse_method(text)
        for p in random_pvectors(5, 100):
            assert 0.0 <= method(p) <= 1.0
