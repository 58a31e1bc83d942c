"""Point values, identities and error contracts of the divergence kernel.

Reference constants below were produced once by the mpmath oracle (50 digits)
and frozen here; exact fractions are asserted directly.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sdivergence import (
    alpha_family,
    chi_sq,
    csiszar_f,
    growth_lower_bound,
    hellinger_sq,
    kl,
    ks,
    ks_curve,
    ks_terms,
    lambda_s,
    log_ratio_stats,
    make_distribution,
    oracle_ks,
    unboundedness_witness,
)
from sdivergence.convexity import ScalarFunctionSpec
from sdivergence.core import Distribution, check_order, log_ratio
from sdivergence.errors import (
    DivergenceOverflow,
    EqualDistributions,
    FunctionDomainError,
    InvalidOrder,
    LengthMismatch,
    NonFiniteEntry,
    NonPositiveEntry,
    NotNormalized,
    OutOfRange,
    TooShort,
    ValidationError,
)

from .conftest import distribution_pairs, orders, random_pair

# frozen oracle output for p=(1/2,1/2), q=(1/4,3/4)
K_HALF = 0.13629669484372685
K_ONE = 0.14384103622589045
K_ZERO = 0.13081203594113694
K_THREE = 0.2037037037037037
HELLINGER_SQ = 0.068148347421863431
RENYI_2 = 0.28768207245178093
I_HALF = 0.96592582628906829


class TestMakeDistribution:
    def test_uniform_accepted(self):
        d = make_distribution([0.5, 0.5])
        assert d.tolist() == [0.5, 0.5]
        assert d.n == 2

    def test_renormalize_scales(self):
        assert make_distribution([1, 1, 2], renormalize=True).tolist() == [0.25, 0.25, 0.5]

    @pytest.mark.parametrize(
        "values, exc",
        [
            ([0.5, 0.0, 0.5], NonPositiveEntry),
            ([1.5, -0.5], NonPositiveEntry),
            ([0.5, float("nan"), 0.5], NonFiniteEntry),
            ([float("inf"), 1.0], NonFiniteEntry),
            ([1.0], TooShort),
            ([], TooShort),
            ([0.5, 0.6], NotNormalized),
            (["a", "b"], ValidationError),
        ],
    )
    def test_rejections(self, values, exc):
        with pytest.raises(exc):
            make_distribution(values)

    def test_tolerance_window(self):
        make_distribution([0.5, 0.5 + 5e-10])
        with pytest.raises(NotNormalized):
            make_distribution([0.5, 0.5 + 5e-9])

    def test_read_only(self):
        d = make_distribution([0.25, 0.75])
        with pytest.raises(ValueError):
            d.probs[0] = 0.5

    def test_direct_construction_validates(self):
        with pytest.raises(NotNormalized):
            Distribution(np.array([0.4, 0.4]))

    @given(st.lists(st.floats(1e-6, 1e6), min_size=2, max_size=50))
    def test_renormalized_sum_is_one(self, values):
        d = make_distribution(values, renormalize=True)
        assert math.fsum(d.tolist()) == pytest.approx(1.0, abs=1e-15)
        assert (d.probs > 0).all()


class TestOrder:
    def test_accepts_ints(self):
        assert check_order(2) == 2.0

    @pytest.mark.parametrize("s", [float("nan"), float("inf"), -float("inf")])
    def test_rejects_non_finite(self, s):
        with pytest.raises(InvalidOrder):
            check_order(s)


class TestKs:
    @pytest.mark.parametrize(
        "s, expected",
        [(2, 1 / 6), (0.5, K_HALF), (1, K_ONE), (0, K_ZERO), (3, K_THREE), (-1, 0.125)],
    )
    def test_running_pair(self, running_pair, s, expected):
        p, q = running_pair
        assert ks(p, q, s) == pytest.approx(expected, rel=1e-15)

    def test_exact_fraction_at_two(self, running_pair):
        assert ks(*running_pair, 2) == 1 / 6

    def test_equal_pair_is_zero(self, rng):
        p = make_distribution(rng.random(7), renormalize=True)
        for s in (-3, 0, 1e-9, 0.5, 1, 4):
            assert ks(p, p, s) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            ks(make_distribution([0.5, 0.5]), make_distribution([0.2, 0.3, 0.5]), 2)

    def test_curve_matches_points(self, running_pair):
        grid = [-2.0, 0.0, 0.3, 1.0, 2.5]
        assert ks_curve(*running_pair, grid).tolist() == [ks(*running_pair, s) for s in grid]

    def test_terms_sum_to_value(self, rng):
        p, q = random_pair(rng, 40)
        for s in (-2.0, 0.0, 0.7, 1.0, 3.0):
            assert math.fsum(ks_terms(p, q, s).tolist()) == pytest.approx(ks(p, q, s), rel=1e-14)

    def test_overflow_raises(self):
        p = make_distribution([1 - 1e-6, 1e-6])
        q = make_distribution([1e-6, 1 - 1e-6])
        with pytest.raises(DivergenceOverflow):
            ks(p, q, 500)

    def test_large_order_without_overflow(self):
        # log-domain rows: finite result far beyond exp(600)
        p = make_distribution([1 - 1e-6, 1e-6])
        q = make_distribution([1e-6, 1 - 1e-6])
        s = 50.0
        expected = oracle_ks(p, q, s)
        assert ks(p, q, s) == pytest.approx(expected, rel=1e-12)
        assert ks(p, q, s) > 1e250

    @pytest.mark.parametrize("s", [1e-9, -1e-9, 1e-6, 1 - 1e-9, 1 + 1e-6, 1e-4, 0.5 + 1e-12])
    def test_near_singular_orders_match_oracle(self, rng, s):
        p, q = random_pair(rng, 10)
        assert ks(p, q, s) == pytest.approx(oracle_ks(p, q, s), rel=1e-12)

    def test_near_equal_pair_matches_oracle(self, rng):
        q = make_distribution(rng.random(16), renormalize=True)
        p = make_distribution(q.probs * (1 + 1e-9 * rng.standard_normal(16)), renormalize=True)
        for s in (-4.0, 1e-9, 0.5, 1.0, 5.0):
            assert ks(p, q, s) == pytest.approx(oracle_ks(p, q, s), rel=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(distribution_pairs(), orders)
    def test_swap_identity(self, pair, s):
        p, q = pair
        assert ks(p, q, s) == pytest.approx(ks(q, p, 1 - s), rel=1e-12, abs=1e-300)

    @settings(max_examples=60, deadline=None)
    @given(distribution_pairs(), orders)
    def test_nonnegative(self, pair, s):
        assert ks(*pair, s) >= 0.0

    @settings(max_examples=40, deadline=None)
    @given(distribution_pairs(), orders, orders)
    def test_log_convex_midpoint(self, pair, s, t):
        p, q = pair
        ka, kb, km = ks_curve(p, q, [s, t, (s + t) / 2]).tolist()
        assert km * km <= ka * kb * (1 + 1e-12) + 1e-300


class TestLogRatio:
    def test_exact_antisymmetry(self, rng):
        a, b = rng.random(1000) + 1e-3, rng.random(1000) + 1e-3
        assert np.array_equal(log_ratio(a, b), -log_ratio(b, a))

    def test_stats(self, running_pair):
        st_ = log_ratio_stats(*running_pair)
        assert st_.Lmax == pytest.approx(math.log(2), rel=1e-15)
        assert st_.argmax_index == 0
        # the q-weighted mean of ln(p/q) is -KL(q||p)
        assert st_.mu1 == pytest.approx(-K_ZERO, rel=1e-14)


class TestClassicalMeasures:
    def test_kl_both_ways(self, running_pair):
        p, q = running_pair
        assert kl(p, q) == pytest.approx(K_ONE, rel=1e-15)
        assert kl(q, p) == pytest.approx(K_ZERO, rel=1e-15)

    def test_hellinger(self, running_pair):
        assert hellinger_sq(*running_pair) == pytest.approx(HELLINGER_SQ, rel=1e-15)

    def test_hellinger_identity(self, running_pair):
        assert ks(*running_pair, 0.5) == pytest.approx(2 * hellinger_sq(*running_pair), rel=1e-15)

    def test_chi_sq_exact(self, running_pair):
        p, q = running_pair
        assert chi_sq(p, q) == 1 / 3

    def test_chi_sq_asymmetric(self, running_pair):
        p, q = running_pair
        # sum (q-p)^2/p = (1/16)/(1/2) * 2
        assert chi_sq(q, p) == 0.25

    def test_equal_pair(self, rng):
        p = make_distribution(rng.random(5), renormalize=True)
        assert kl(p, p) == hellinger_sq(p, p) == chi_sq(p, p) == 0.0


class TestAlphaFamily:
    def test_alpha_two(self, running_pair):
        r = alpha_family(*running_pair, 2)
        assert r.i_alpha == pytest.approx(4 / 3, rel=1e-15)
        assert r.renyi == pytest.approx(RENYI_2, rel=1e-14)
        assert r.tsallis == pytest.approx(1 / 3, rel=1e-15)

    def test_alpha_half(self, running_pair):
        r = alpha_family(*running_pair, 0.5)
        assert r.i_alpha == pytest.approx(I_HALF, rel=1e-15)
        assert r.tsallis == pytest.approx(hellinger_sq(*running_pair), rel=1e-14)

    def test_alpha_one_is_kl(self, running_pair):
        r = alpha_family(*running_pair, 1)
        assert r.i_alpha == 1.0
        assert r.renyi == r.tsallis == pytest.approx(K_ONE, rel=1e-15)

    def test_equal_pair(self):
        p = make_distribution([0.2, 0.3, 0.5])
        for a in (0.5, 2.0, -1.0):
            assert alpha_family(p, p, a) == (1.0, 0.0, 0.0)


class TestCsiszar:
    def test_xlogx_gives_kl(self, running_pair):
        f = ScalarFunctionSpec.builtin("xlogx")
        assert csiszar_f(*running_pair, f) == pytest.approx(kl(*running_pair), abs=1e-12)

    def test_square_gap_gives_chi_sq(self, running_pair):
        assert csiszar_f(*running_pair, lambda x: (x - 1) ** 2) == pytest.approx(1 / 3, abs=1e-12)

    def test_constant_gives_one(self, running_pair):
        assert csiszar_f(*running_pair, lambda x: 1.0) == 1.0

    def test_scalar_only_callable(self, running_pair):
        assert csiszar_f(*running_pair, lambda x: math.log(x) * x) == pytest.approx(K_ONE, abs=1e-12)

    def test_domain_error(self, running_pair):
        with pytest.raises(FunctionDomainError):
            csiszar_f(*running_pair, lambda x: math.log(x - 1.5))


class TestLambda:
    def test_reduces_to_ks(self):
        w = make_distribution([0.25, 0.75])
        assert lambda_s([2, 2 / 3], w, 2) == pytest.approx(1 / 6, rel=1e-15)

    def test_exact_value(self):
        assert lambda_s([1, 3], make_distribution([0.5, 0.5]), 2) == 0.5

    def test_constant_sequence(self):
        w = make_distribution([0.1, 0.2, 0.7])
        for s in (-2, 0, 0.5, 1, 3):
            assert lambda_s([4.0, 4.0, 4.0], w, s) == 0.0

    def test_rejects_bad_x(self):
        w = make_distribution([0.5, 0.5])
        with pytest.raises(NonPositiveEntry):
            lambda_s([1.0, 0.0], w, 2)
        with pytest.raises(LengthMismatch):
            lambda_s([1.0, 2.0, 3.0], w, 2)

    @settings(max_examples=40, deadline=None)
    @given(distribution_pairs(), orders)
    def test_likelihood_ratio_form(self, pair, s):
        p, q = pair
        assume(p != q)
        got = lambda_s(p.probs / q.probs, q, s)
        ref = ks(p, q, s)
        assert abs(got - ref) <= 1e-11 * max(1.0, ref)


class TestGrowthBound:
    def test_values(self, running_pair):
        assert growth_lower_bound(*running_pair, 3) == pytest.approx(1 / 6, rel=1e-15)
        assert growth_lower_bound(*running_pair, 2) == 0.0
        assert ks(*running_pair, 3) > growth_lower_bound(*running_pair, 3)

    def test_rejects_small_orders(self, running_pair):
        with pytest.raises(OutOfRange):
            growth_lower_bound(*running_pair, 1.0)

    def test_equal_pair(self):
        p = make_distribution([0.5, 0.5])
        with pytest.raises(EqualDistributions):
            growth_lower_bound(p, p, 3)

    @settings(max_examples=40, deadline=None)
    @given(distribution_pairs(), st.floats(1.001, 50.0))
    def test_bound_holds(self, pair, s):
        p, q = pair
        assume(p != q)
        b = growth_lower_bound(p, q, s)
        assert ks(p, q, s) >= b - 1e-12 * max(1.0, abs(b))


class TestWitness:
    def test_running_pair_positive_order(self, running_pair):
        s = unboundedness_witness(*running_pair)
        assert 1 < s <= 50 and ks(*running_pair, s) > 1e3

    def test_near_equal_pair_uses_negative_tail(self):
        q = make_distribution([0.3, 0.7])
        p = make_distribution([0.3 + 1e-9, 0.7 - 1e-9])
        s = unboundedness_witness(p, q)
        assert s < -49 and ks(p, q, s) > 1e3

    def test_equal_pair(self):
        p = make_distribution([0.3, 0.7])
        assert unboundedness_witness(p, p) is None
