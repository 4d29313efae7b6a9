import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from absmeter import (
    Alphabet,
    Letter,
    Pmf,
    entropy,
    kl_divergence,
    make_quantized_range,
    make_uniform,
    validate,
)


def uniform(n, tag="x"):
    return make_uniform([Letter(f"{tag}{i}") for i in range(n)])


class TestMakeUniform:
    def test_two_letters_split_evenly(self):
        a = uniform(2)
        assert a.pmf["x0"] == 0.5
        assert a.pmf["x1"] == 0.5
        assert abs(entropy(a) - 1.0) <= 1e-12

    def test_single_letter_is_certain(self):
        a = uniform(1)
        assert a.pmf["x0"] == 1.0
        h = entropy(a)
        assert h == 0.0
        assert math.copysign(1.0, h) == 1.0  # 0.0, never -0.0

    def test_1001_letters(self):
        a = uniform(1001)
        assert a.n_letters == 1001
        assert abs(entropy(a) - math.log2(1001)) <= 1e-12

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            make_uniform([])

    def test_rejects_duplicate_ids(self):
        with pytest.raises(ValueError):
            make_uniform([Letter("a"), Letter("a")])


class TestQuantizedRange:
    def test_barchart_grid(self):
        a = make_quantized_range(0.0, 10000.0, 0.01)
        assert a.n_letters == 1_000_001
        assert a.values[0] == 0.0
        assert a.values[-1] == 10000.0
        assert a.label_of(0) == "0.00"
        assert a.label_of(1) == "0.01"
        assert a.label_of(1_000_000) == "10000.00"
        assert abs(a.pmf.mass() - 1.0) <= 1e-9

    def test_integer_grid(self):
        a = make_quantized_range(0, 100, 1)
        assert a.n_letters == 101
        assert a.label_of(100) == "100"

    def test_half_step_grid(self):
        a = make_quantized_range(0, 1, 0.5)
        assert list(a.values) == [0.0, 0.5, 1.0]
        assert a.label_of(1) == "0.5"

    def test_single_point_grid(self):
        a = make_quantized_range(3.0, 3.0, 1.0)
        assert a.n_letters == 1
        assert a.values[0] == 3.0

    @pytest.mark.parametrize(
        "lo,hi,step",
        [
            (0.0, 1.0, 0.0),
            (0.0, 1.0, -0.5),
            (1.0, 0.0, 0.5),
            (0.0, 1.0, 0.3),
            (0.0, math.inf, 1.0),
            (math.nan, 1.0, 0.5),
        ],
    )
    def test_rejects_bad_grids(self, lo, hi, step):
        with pytest.raises(ValueError):
            make_quantized_range(lo, hi, step)

    def test_grid_letter_lookup(self):
        a = make_quantized_range(0, 10, 1)
        assert a.has_letter(0)
        assert a.has_letter(10)
        assert not a.has_letter(11)
        assert not a.has_letter("3")
        assert a.index_of(4) == 4
        with pytest.raises(KeyError):
            a.index_of("4")


class TestPmf:
    def test_lookup_and_mass(self):
        p = Pmf({"a": 0.25, "b": 0.75})
        assert p["b"] == 0.75
        assert "a" in p and "z" not in p
        assert p.as_dict() == {"a": 0.25, "b": 0.75}
        assert abs(p.mass() - 1.0) <= 1e-12

    def test_reports_negative_mass(self):
        p = Pmf({"a": -0.1, "b": 0.6})
        problems = p.violations()
        assert any("negative mass" in msg for msg in problems)
        assert any("'a'" in msg for msg in problems)
        with pytest.raises(ValueError):
            p.require_valid()

    def test_reports_wrong_total(self):
        problems = Pmf({"a": 0.45, "b": 0.45}).violations()
        assert any("mass sums to" in msg for msg in problems)

    def test_valid_pmf_has_no_violations(self):
        assert Pmf({"a": 0.5, "b": 0.5}).violations() == []

    def test_aligned_to_reorders(self):
        p = Pmf({"a": 0.1, "b": 0.2, "c": 0.7})
        assert np.allclose(p.aligned_to(("c", "a", "b")), [0.7, 0.1, 0.2])

    def test_aligned_to_rejects_unknown_letters(self):
        p = Pmf({"a": 0.5, "b": 0.5})
        with pytest.raises(ValueError):
            p.aligned_to(("a", "z"))
        with pytest.raises(ValueError):
            p.aligned_to(("a",))


class TestEntropy:
    def test_fair_coin(self):
        assert abs(entropy(Pmf({"h": 0.5, "t": 0.5})) - 1.0) <= 1e-12

    def test_zero_mass_letters_contribute_nothing(self):
        h = entropy(Pmf({"a": 0.5, "b": 0.5, "c": 0.0}))
        assert abs(h - 1.0) <= 1e-12

    def test_matches_oracle_on_biased_pmf(self):
        d = {"a": 0.7, "b": 0.2, "c": 0.1}
        assert abs(entropy(Pmf(d)) - oracles.entropy_bits(d)) <= 1e-12

    def test_rejects_invalid_pmf(self):
        with pytest.raises(ValueError):
            entropy(Pmf({"a": 0.9}))


class TestKlDivergence:
    def test_identical_pmfs_diverge_by_zero(self):
        p = Pmf({"a": 0.3, "b": 0.7})
        assert kl_divergence(p, p) == 0.0

    def test_point_mass_against_fair_coin_is_one_bit(self):
        q = Pmf({"a": 1.0, "b": 0.0})
        p = Pmf({"a": 0.5, "b": 0.5})
        assert abs(kl_divergence(q, p) - 1.0) <= 1e-12

    def test_support_violation_is_positive_infinity(self):
        q = Pmf({"a": 0.5, "b": 0.5})
        p = Pmf({"a": 1.0, "b": 0.0})
        d = kl_divergence(q, p)
        assert math.isinf(d) and d > 0

    def test_biased_three_letter_value(self):
        q = {"a": 0.5, "b": 0.25, "c": 0.25}
        p = {"a": 1 / 3, "b": 1 / 3, "c": 1 / 3}
        d = kl_divergence(Pmf(q), Pmf(p))
        assert abs(d - 0.08496250072115619) <= 1e-12
        assert abs(d - oracles.kl_bits(q, p)) <= 1e-12

    def test_letter_order_does_not_matter(self):
        q = Pmf({"b": 0.25, "a": 0.75})
        p = Pmf({"a": 0.5, "b": 0.5})
        assert abs(kl_divergence(q, p) - oracles.kl_bits(q.as_dict(), p.as_dict())) <= 1e-12

    def test_rejects_mismatched_letter_sets(self):
        with pytest.raises(ValueError):
            kl_divergence(Pmf({"a": 1.0}), Pmf({"b": 1.0}))


class TestValidate:
    def test_clean_alphabet(self):
        assert validate(uniform(4)) == []

    def test_reports_pmf_problems(self):
        a = Alphabet("bad", [Letter("a"), Letter("b")], pmf=Pmf({"a": 0.4, "b": 0.5}))
        assert any("mass sums to" in msg for msg in validate(a))

    def test_reports_key_mismatch(self):
        a = Alphabet("bad", [Letter("a"), Letter("b")], pmf=Pmf({"a": 0.5, "q": 0.5}))
        problems = validate(a)
        assert any("q" in msg for msg in problems)


@st.composite
def pmf_dicts(draw, min_size=2, max_size=64):
    n = draw(st.integers(min_size, max_size))
    weights = draw(
        st.lists(
            st.floats(0.0, 1000.0, allow_nan=False), min_size=n, max_size=n
        ).filter(lambda w: sum(w) > 0.0)
    )
    total = math.fsum(weights)
    return {f"x{i}": w / total for i, w in enumerate(weights)}


class TestDistributionProperties:
    @given(pmf_dicts())
    @settings(max_examples=200, deadline=None)
    def test_entropy_bounds(self, d):
        h = entropy(Pmf(d))
        assert -1e-12 <= h <= math.log2(len(d)) + 1e-12

    @given(pmf_dicts())
    @settings(max_examples=100, deadline=None)
    def test_entropy_is_permutation_invariant(self, d):
        flipped = dict(reversed(list(d.items())))
        assert abs(entropy(Pmf(d)) - entropy(Pmf(flipped))) <= 1e-12

    @given(pmf_dicts())
    @settings(max_examples=100, deadline=None)
    def test_uniform_maximizes_entropy(self, d):
        n = len(d)
        flat = Pmf({k: 1.0 / n for k in d})
        assert entropy(Pmf(d)) <= entropy(flat) + 1e-12

    @given(pmf_dicts(), pmf_dicts())
    @settings(max_examples=200, deadline=None)
    def test_gibbs_inequality(self, d1, d2):
        n = min(len(d1), len(d2))
        q = {f"x{i}": v for i, v in enumerate(_renorm(list(d1.values())[:n]))}
        p = {f"x{i}": v for i, v in enumerate(_renorm(list(d2.values())[:n]))}
        d = kl_divergence(Pmf(q), Pmf(p))
        assert d >= -1e-12
        assert abs(d - oracles.kl_bits(q, p)) <= 1e-9 or (
            math.isinf(d) and math.isinf(oracles.kl_bits(q, p))
        )

    @given(pmf_dicts())
    @settings(max_examples=100, deadline=None)
    def test_gibbs_equality_on_identical_pmfs(self, d):
        assert kl_divergence(Pmf(d), Pmf(dict(d))) <= 1e-12


def _renorm(weights):
    total = math.fsum(weights)
    if total <= 0.0:
        return [1.0 / len(weights)] * len(weights)
    return [w / total for w in weights]
