import math

import numpy as np
import pytest

import builders
import oracles
from absmeter import (
    Alphabet,
    Channel,
    Letter,
    Pmf,
    ReconstructionChannel,
    alphabet_compression,
    bayes_inverse,
    compose,
    entropy,
    kl_divergence,
    make_quantized_range,
    make_uniform,
    potential_distortion,
    push_forward,
    reconstructed_pmf,
)
from absmeter.channel import (
    MAX_DERIVED_NONZEROS,
    MAX_DETERMINISTIC_LETTERS,
    MAX_STOCHASTIC_LETTERS,
)


def uniform(n, tag):
    return make_uniform([Letter(f"{tag}{i}") for i in range(n)], id=tag)


def rows_of(channel):
    return {x: channel.row(x) for x in channel.source.letter_ids}


class TestConstruction:
    def test_needs_exactly_one_kind(self):
        a = uniform(2, "a")
        with pytest.raises(ValueError):
            Channel("empty", a, a)

    def test_deterministic_requires_total_map(self):
        a, b = uniform(3, "a"), uniform(2, "b")
        with pytest.raises(ValueError, match="no image"):
            Channel.deterministic("f", a, b, {"a0": "b0", "a1": "b1"})

    def test_deterministic_rejects_unknown_letters(self):
        a, b = uniform(2, "a"), uniform(2, "b")
        with pytest.raises(ValueError, match="not a letter"):
            Channel.deterministic("f", a, b, {"a0": "b0", "a1": "b1", "zz": "b0"})
        with pytest.raises(ValueError, match="not a letter"):
            Channel.deterministic("f", a, b, {"a0": "b0", "a1": "zz"})

    def test_stochastic_rejects_bad_rows(self):
        a, b = uniform(2, "a"), uniform(2, "b")
        with pytest.raises(ValueError, match="sums to"):
            Channel.stochastic("s", a, b, {"a0": {"b0": 0.9}, "a1": {"b1": 1.0}})
        with pytest.raises(ValueError, match="negative"):
            Channel.stochastic(
                "s", a, b, {"a0": {"b0": 1.5, "b1": -0.5}, "a1": {"b1": 1.0}}
            )
        with pytest.raises(ValueError, match="no conditional row"):
            Channel.stochastic("s", a, b, {"a0": {"b0": 1.0}})

    def test_deterministic_size_bound(self):
        big = make_quantized_range(0, MAX_DETERMINISTIC_LETTERS, 1, id="big")
        tiny = uniform(1, "t")
        with pytest.raises(ValueError, match="at most"):
            Channel.deterministic("f", big, tiny, {})

    def test_stochastic_size_bound(self):
        big = uniform(MAX_STOCHASTIC_LETTERS + 1, "big")
        tiny = uniform(1, "t")
        with pytest.raises(ValueError, match="at most"):
            Channel.stochastic("s", big, tiny, {})

    def test_row_and_conditional_lookup(self):
        a, b = uniform(2, "a"), uniform(3, "b")
        s = Channel.stochastic(
            "s", a, b, {"a0": {"b0": 0.25, "b2": 0.75}, "a1": {"b1": 1.0}}
        )
        assert s.row("a0") == {"b0": 0.25, "b2": 0.75}
        assert s.conditional("b2", "a0") == 0.75
        assert s.conditional("b1", "a0") == 0.0
        f = Channel.deterministic("f", a, b, {"a0": "b2", "a1": "b0"})
        assert f.image_of("a0") == "b2"
        assert f.row("a1") == {"b0": 1.0}
        with pytest.raises(ValueError, match="stochastic"):
            s.image_of("a0")


class TestPushForward:
    def test_identity_preserves_distribution(self):
        a = uniform(5, "a")
        prior = Pmf({"a0": 0.5, "a1": 0.1, "a2": 0.1, "a3": 0.1, "a4": 0.2})
        out = push_forward(prior, Channel.identity(a))
        assert np.allclose(out.aligned_to(prior.ids), prior.vec)

    def test_constant_channel_degenerates(self):
        a, b = uniform(4, "a"), uniform(3, "b")
        const = Channel.deterministic("k", a, b, {x: "b1" for x in a.letter_ids})
        out = push_forward(a.pmf, const)
        assert out["b1"] == pytest.approx(1.0, abs=1e-12)
        assert out["b0"] == 0.0

    def test_matches_oracle_on_random_channels(self):
        rng = np.random.default_rng(20260816)
        for trial in range(100):
            src = builders.random_alphabet(rng, int(rng.integers(2, 13)), "s")
            dst = builders.random_alphabet(rng, int(rng.integers(2, 13)), "d")
            ch, rows = builders.random_channel(rng, src, dst)
            prior, prior_d = builders.random_prior(rng, src)
            got = push_forward(prior, ch).as_dict()
            assert oracles.close(got, oracles.push(prior_d, rows))

    def test_conserves_mass(self):
        rng = np.random.default_rng(7)
        for trial in range(100):
            src = builders.random_alphabet(rng, int(rng.integers(2, 33)), "s")
            dst = builders.random_alphabet(rng, int(rng.integers(2, 33)), "d")
            ch, _ = builders.random_channel(rng, src, dst)
            prior, _ = builders.random_prior(rng, src)
            assert abs(push_forward(prior, ch).mass() - 1.0) <= 1e-9

    def test_rejects_foreign_prior(self):
        a, b = uniform(2, "a"), uniform(2, "b")
        ch = Channel.identity(a)
        with pytest.raises(ValueError):
            push_forward(b.pmf, ch)


class TestCompose:
    def test_identity_identity(self):
        a = uniform(4, "a")
        c = compose(Channel.identity(a), Channel.identity(a))
        assert c.is_deterministic
        assert [c.image_of(x) for x in a.letter_ids] == list(a.letter_ids)

    def test_quantizer_after_identity_is_quantizer(self):
        src = make_quantized_range(0, 100, 1, id="vals")
        dst = uniform(11, "px")
        q = Channel.quantizer("q", src, dst, pixels=11)
        c = compose(Channel.identity(src), q)
        assert c.is_deterministic
        assert [c.image_of(x) for x in src.letter_ids] == [
            q.image_of(x) for x in src.letter_ids
        ]

    def test_deterministic_pair_stays_deterministic(self):
        rng = np.random.default_rng(3)
        a, b, c = uniform(5, "a"), uniform(4, "b"), uniform(3, "c")
        f, fi = builders.random_deterministic(rng, a, b)
        g, gi = builders.random_deterministic(rng, b, c)
        h = compose(f, g)
        assert h.is_deterministic
        for x in a.letter_ids:
            assert h.image_of(x) == gi[fi[x]]

    def test_matches_oracle_for_every_kind_pairing(self):
        rng = np.random.default_rng(41)
        for kind1 in ("det", "stoch"):
            for kind2 in ("det", "stoch"):
                for trial in range(25):
                    a = builders.random_alphabet(rng, int(rng.integers(2, 9)), "a")
                    b = builders.random_alphabet(rng, int(rng.integers(2, 9)), "b")
                    c = builders.random_alphabet(rng, int(rng.integers(2, 9)), "c")
                    make1 = (
                        builders.random_deterministic
                        if kind1 == "det"
                        else builders.random_stochastic
                    )
                    make2 = (
                        builders.random_deterministic
                        if kind2 == "det"
                        else builders.random_stochastic
                    )
                    f, r1 = make1(rng, a, b, "f")
                    g, r2 = make2(rng, b, c, "g")
                    if kind1 == "det":
                        r1 = oracles.det_rows(r1)
                    if kind2 == "det":
                        r2 = oracles.det_rows(r2)
                    got = rows_of(compose(f, g))
                    want = oracles.compose_rows(r1, r2)
                    for x in a.letter_ids:
                        assert oracles.close(got[x], want[x])

    def test_agrees_with_two_step_push(self):
        rng = np.random.default_rng(99)
        for trial in range(50):
            a = builders.random_alphabet(rng, int(rng.integers(2, 9)), "a")
            b = builders.random_alphabet(rng, int(rng.integers(2, 9)), "b")
            c = builders.random_alphabet(rng, int(rng.integers(2, 9)), "c")
            f, _ = builders.random_channel(rng, a, b, "f")
            g, _ = builders.random_channel(rng, b, c, "g")
            prior, _ = builders.random_prior(rng, a)
            direct = push_forward(prior, compose(f, g))
            stepped = push_forward(push_forward(prior, f), g)
            assert np.allclose(
                direct.aligned_to(c.letter_ids),
                stepped.aligned_to(c.letter_ids),
                atol=1e-12,
            )

    def test_rejects_broken_chain(self):
        a, b = uniform(2, "a"), uniform(3, "b")
        with pytest.raises(ValueError, match="do not share letters"):
            compose(Channel.identity(a), Channel.identity(b))


class TestQuantizer:
    def test_barchart_bin_occupancy(self):
        readings = make_quantized_range(0.0, 10000.0, 0.01, id="readings")
        bars = make_quantized_range(0, 1000, 1, id="bars")
        q = Channel.quantizer("plot", readings, bars, pixels=1001)
        counts = np.bincount(q._image, minlength=1001)
        assert counts[0] == 500
        assert counts[1000] == 501
        assert (counts[1:1000] == 1000).all()

    def test_float_path_equals_integer_arithmetic(self):
        readings = make_quantized_range(0.0, 10000.0, 0.01, id="readings")
        bars = make_quantized_range(0, 1000, 1, id="bars")
        q = Channel.quantizer("plot", readings, bars, pixels=1001)
        k = np.arange(1_000_001, dtype=np.int64)
        assert (q._image == (k + 500) // 1000).all()

    def test_halfway_values_round_up(self):
        # grid 0, 0.5, .., 2 onto 3 levels scales each value to itself, so
        # 0.5 and 1.5 sit exactly between levels and must round upward
        src = make_quantized_range(0, 2, 0.5, id="vals")
        dst = uniform(3, "px")
        q = Channel.quantizer("q", src, dst, pixels=3)
        assert [q.image_of(v) for v in src.letter_ids] == [
            "px0", "px1", "px1", "px2", "px2"
        ]

    def test_single_pixel_collapses_everything(self):
        src = make_quantized_range(0, 9, 1, id="vals")
        dst = uniform(1, "px")
        q = Channel.quantizer("q", src, dst, pixels=1)
        assert set(q._image.tolist()) == {0}

    def test_requires_grid_source_and_matching_target(self):
        plain = uniform(4, "a")
        px = uniform(4, "px")
        with pytest.raises(ValueError, match="numeric grid"):
            Channel.quantizer("q", plain, px, pixels=4)
        grid = make_quantized_range(0, 3, 1)
        with pytest.raises(ValueError, match="pixels"):
            Channel.quantizer("q", grid, px, pixels=5)


class TestBayesInverse:
    def test_injective_channel_inverts_exactly(self):
        a, b = uniform(4, "a"), uniform(4, "b")
        f = Channel.deterministic(
            "f", a, b, {"a0": "b2", "a1": "b0", "a2": "b3", "a3": "b1"}
        )
        r = bayes_inverse(f, a.pmf)
        assert isinstance(r, ReconstructionChannel)
        assert r.row("b2") == {"a0": 1.0}
        assert r.row("b0") == {"a1": 1.0}
        assert r.row("b3") == {"a2": 1.0}
        assert r.row("b1") == {"a3": 1.0}

    def test_constant_channel_posterior_is_prior(self):
        a, b = uniform(3, "a"), uniform(2, "b")
        prior = Pmf({"a0": 0.6, "a1": 0.3, "a2": 0.1})
        const = Channel.deterministic("k", a, b, {x: "b0" for x in a.letter_ids})
        r = bayes_inverse(const, prior)
        assert oracles.close(r.row("b0"), prior.as_dict())
        # the unreachable output's row falls back to the prior as well
        assert oracles.close(r.row("b1"), prior.as_dict())

    def test_quantizer_bin_posterior_is_uniform_over_members(self):
        readings = make_quantized_range(0.0, 10000.0, 0.01, id="readings")
        bars = make_quantized_range(0, 1000, 1, id="bars")
        q = Channel.quantizer("plot", readings, bars, pixels=1001)
        r = bayes_inverse(q, readings.pmf)
        row = r.row(7)
        assert len(row) == 1000
        assert all(abs(p - 1e-3) <= 1e-15 for p in row.values())
        edge = r.row(0)
        assert len(edge) == 500
        assert all(abs(p - 1 / 500) <= 1e-15 for p in edge.values())

    def test_matches_oracle_on_random_channels(self):
        rng = np.random.default_rng(17)
        for trial in range(60):
            src = builders.random_alphabet(rng, int(rng.integers(2, 11)), "s")
            dst = builders.random_alphabet(rng, int(rng.integers(2, 11)), "d")
            ch, rows = builders.random_channel(rng, src, dst)
            prior, prior_d = builders.random_prior(rng, src)
            got = rows_of(bayes_inverse(ch, prior))
            want = oracles.bayes_rows(rows, prior_d, list(dst.letter_ids))
            for y in dst.letter_ids:
                assert oracles.close(got[y], want[y]), f"trial {trial}, row {y!r}"

    def test_refuses_oversized_derivations(self):
        n = 10_000
        big = make_quantized_range(0, n - 1, 1, id="big")
        ch = Channel.deterministic("all-to-0", big, big, {i: 0 for i in range(n)})
        assert n * n > MAX_DERIVED_NONZEROS
        with pytest.raises(ValueError, match="conditional entries"):
            bayes_inverse(ch, big.pmf)


class TestReconstruction:
    def test_bayes_round_trip_restores_prior(self):
        rng = np.random.default_rng(23)
        for trial in range(60):
            src = builders.random_alphabet(rng, int(rng.integers(2, 11)), "s")
            dst = builders.random_alphabet(rng, int(rng.integers(2, 11)), "d")
            ch, _ = builders.random_channel(rng, src, dst)
            prior, _ = builders.random_prior(rng, src)
            q = reconstructed_pmf(prior, ch, bayes_inverse(ch, prior))
            assert np.allclose(
                q.aligned_to(prior.ids), prior.vec, atol=1e-12
            )

    def test_fixed_guess_degenerates(self):
        # four letters so the uniform prior's quarters sum to exactly 1.0
        a, b = uniform(4, "a"), uniform(2, "b")
        const = Channel.deterministic("k", a, b, {x: "b0" for x in a.letter_ids})
        guess = Channel.deterministic(
            "g", b, a, {"b0": "a1", "b1": "a1"}
        ).as_reconstruction()
        q = reconstructed_pmf(a.pmf, const, guess)
        assert q.as_dict() == {"a0": 0.0, "a1": 1.0, "a2": 0.0, "a3": 0.0}

    def test_biased_reconstruction_three_letters(self):
        a, b = uniform(3, "a"), uniform(1, "b")
        const = Channel.deterministic("k", a, b, {x: "b0" for x in a.letter_ids})
        biased = Channel.stochastic(
            "biased", b, a, {"b0": {"a0": 0.5, "a1": 0.25, "a2": 0.25}}
        ).as_reconstruction()
        q = reconstructed_pmf(a.pmf, const, biased)
        assert oracles.close(q.as_dict(), {"a0": 0.5, "a1": 0.25, "a2": 0.25})
        pd = potential_distortion(a.pmf, const, biased)
        assert abs(pd - 0.08496250072115619) <= 1e-12

    def test_distortion_is_infinite_off_prior_support(self):
        a, b = uniform(2, "a"), uniform(1, "b")
        prior = Pmf({"a0": 1.0, "a1": 0.0})
        const = Channel.deterministic("k", a, b, {x: "b0" for x in a.letter_ids})
        guess = Channel.deterministic("g", b, a, {"b0": "a1"}).as_reconstruction()
        pd = potential_distortion(prior, const, guess)
        assert math.isinf(pd) and pd > 0

    def test_rejects_mismatched_chain(self):
        a, b, c = uniform(2, "a"), uniform(2, "b"), uniform(2, "c")
        f = Channel.identity(a)
        wrong = Channel.identity(c).as_reconstruction()
        with pytest.raises(ValueError):
            reconstructed_pmf(a.pmf, f, wrong)
        backwards = Channel.deterministic(
            "r", b, c, {"b0": "c0", "b1": "c1"}
        ).as_reconstruction()
        with pytest.raises(ValueError):
            reconstructed_pmf(a.pmf, f, backwards)


class TestCompression:
    def test_identity_compresses_nothing(self):
        a = uniform(8, "a")
        assert alphabet_compression(a.pmf, Channel.identity(a)) == 0.0

    def test_merge_compresses_one_bit(self):
        a, b = uniform(4, "a"), uniform(2, "b")
        f = Channel.deterministic(
            "f", a, b, {"a0": "b0", "a1": "b0", "a2": "b1", "a3": "b1"}
        )
        assert abs(alphabet_compression(a.pmf, f) - 1.0) <= 1e-12

    def test_fanout_goes_negative(self):
        one = uniform(1, "one")
        wide = uniform(1001, "wide")
        fan = Channel.stochastic(
            "fan", one, wide, {"one0": {y: 1 / 1001 for y in wide.letter_ids}}
        )
        ac = alphabet_compression(one.pmf, fan)
        assert abs(ac + math.log2(1001)) <= 1e-9

    def test_deterministic_never_negative(self):
        rng = np.random.default_rng(55)
        for trial in range(100):
            src = builders.random_alphabet(rng, int(rng.integers(2, 33)), "s")
            dst = builders.random_alphabet(rng, int(rng.integers(2, 33)), "d")
            ch, _ = builders.random_deterministic(rng, src, dst)
            prior, _ = builders.random_prior(rng, src)
            assert alphabet_compression(prior, ch) >= -1e-12
