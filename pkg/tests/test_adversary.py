import itertools
import math

import numpy as np
import pytest

from groverqss import (
    CaptureAll,
    ConfigurationError,
    GuessDiffusion,
    Honest,
    InterceptResend,
    MarkedSet,
    ProductState,
    Scenario,
    apply_oracle,
    expand_product,
)
from groverqss import adversary as adv
from groverqss.strategies import GUESS_THEN_MEASURE

FOUR_MARKED = MarkedSet((4, 6, 8, 11))
PLUS4 = ProductState.parse("+,+,+,+")


def scenario(marked=FOUR_MARKED, initial=PLUS4, **kw):
    return Scenario(4, initial, marked, trials=1, seed=kw.pop("seed", 0), **kw)


def f(p, q):
    return complex(p) / 8 + 1j * complex(q) / 8


# Printed amplitudes (in eighths) for rows 7 and 8, grouped as listed.
ROW7 = {
    f(-1, -1): ["0000", "0100", "1000", "1100"],
    f(3, 1): ["0001", "0101"],
    f(-1, 1): ["0010", "0110", "1001", "1010", "1101", "1110"],
    f(1, 1): ["0011", "0111"],
    f(-3, 1): ["1011", "1111"],
}
ROW8 = {
    f(-1, 1): ["0000", "0110", "1001", "1100", "1111"],
    f(1, 1): ["0001", "0111"],
    f(-1, -1): ["0010", "1000", "1011", "1110"],
    f(3, 1): ["0011"],
    f(-3, 1): ["0100", "1101"],
    f(1, -1): ["0101"],
    f(-3, -1): ["1010"],
}


def printed_vector(groups):
    v = np.zeros(16, dtype=complex)
    seen = []
    for amp, kets in groups.items():
        for k in kets:
            v[int(k, 2)] = amp
            seen.append(k)
    assert sorted(seen) == [format(i, "04b") for i in range(16)]
    return v


class TestCounting:
    def test_spaces(self):
        assert adv.guess_space_size(4) == 256
        assert adv.marked_set_space(16, 4) == 1820

    def test_census_by_enumeration(self):
        assert adv.enumerate_census(16, 4) == [495, 880, 396, 48, 1]
        assert adv.enumerate_census(16, 4, FOUR_MARKED.indices) == [495, 880, 396, 48, 1]
        assert adv.overlap_census(16, 4) == [495, 880, 396, 48, 1]

    @pytest.mark.parametrize("N", range(1, 13))
    def test_census_identities(self, N):
        for M in range(N + 1):
            census = adv.overlap_census(N, M)
            assert sum(census) == math.comb(N, M)
            assert census == adv.enumerate_census(N, M)

    def test_bad_counts(self):
        with pytest.raises(ConfigurationError):
            adv.marked_set_space(4, 5)
        with pytest.raises(ConfigurationError):
            adv.guess_space_size(0)


class TestGuessDiffusion:
    def test_correct_guess_undetected(self):
        assert adv.detection_probability(scenario(), GuessDiffusion(PLUS4)) == pytest.approx(0, abs=1e-12)

    def test_honest_undetected(self):
        assert adv.detection_probability(scenario(), Honest()) == pytest.approx(0, abs=1e-12)

    def test_zero_overlap_guess_three_quarters(self):
        # the reflection only flips a global sign, leaving the oracle pattern:
        # a quarter of the weight sits on marked states
        zero = ProductState.parse("+,+,-,+")
        assert abs(np.vdot(expand_product(zero).amplitudes, apply_oracle(expand_product(PLUS4), FOUR_MARKED).amplitudes)) < 1e-15
        assert adv.detection_probability(scenario(), GuessDiffusion(zero)) == pytest.approx(0.75, abs=1e-12)
        sc = scenario(adv.TABLE1_DEFAULT_MARKED)
        minus = ProductState.parse("+,-,+,-")
        assert adv.detection_probability(sc, GuessDiffusion(minus)) == pytest.approx(0.75, abs=1e-12)

    def test_uniform_guess_matches_enumeration(self):
        sc = scenario()
        total = 0.0
        letters = ["+", "-", "+i", "-i"]
        for word in itertools.product(letters, repeat=4):
            total += adv.detection_probability(sc, GuessDiffusion(ProductState.parse(list(word))))
        mean = total / 256
        assert adv.detection_probability(sc, GuessDiffusion()) == pytest.approx(mean, abs=1e-12)
        assert mean == pytest.approx(0.75, abs=1e-12)

    def test_only_correct_guess_is_undetected(self):
        sc = scenario()
        letters = ["+", "-", "+i", "-i"]
        nulls = [
            w for w in itertools.product(letters, repeat=4)
            if adv.detection_probability(sc, GuessDiffusion(ProductState.parse(list(w)))) < 1e-12
        ]
        assert nulls == [("+", "+", "+", "+")]

    def test_report_flags_claim(self):
        rep = adv.exact_detection_probability(scenario(), GuessDiffusion(), mc_trials=2000, seed=1)
        assert rep.claim.text == "11/16" and rep.claim.quantity == "detection"
        assert rep.fraction == 3 / 4
        assert rep.discrepancy is True
        assert rep.space_sizes == {"guess_space": 256}


class TestInterceptResend:
    def test_own_set_is_invisible(self):
        assert adv.detection_probability(scenario(), InterceptResend(FOUR_MARKED)) == pytest.approx(0, abs=1e-12)

    def test_single_overlap_fake(self):
        assert adv.detection_probability(scenario(), InterceptResend(MarkedSet((0, 1, 2, 4)))) == pytest.approx(0.75, abs=1e-12)

    def test_disjoint_fake_always_caught(self):
        assert adv.detection_probability(scenario(), InterceptResend(MarkedSet((0, 1, 2, 3)))) == pytest.approx(1, abs=1e-12)

    def test_uniform_equals_census(self):
        sc = scenario()
        enumerated = 1 - adv.detection_probability(sc, InterceptResend())
        assert enumerated == pytest.approx(adv.intercept_census_undetected(sc), abs=1e-12)
        assert enumerated == pytest.approx(0.25, abs=1e-12)

    def test_report(self):
        rep = adv.intercept_resend_report(scenario(), mc_trials=2000, seed=3)
        assert rep.claim.text == "1/728" and rep.claim.quantity == "undetected"
        assert rep.undetected == pytest.approx(0.25, abs=1e-12)
        assert rep.discrepancy is True
        assert rep.space_sizes == {"marked_set_space": 1820}

    def test_wrong_fake_size(self):
        with pytest.raises(ConfigurationError):
            adv.intercept_resend_report(scenario(), MarkedSet((1, 2)))


class TestCaptureAll:
    def test_measure_immediately(self):
        assert adv.detection_probability(scenario(), CaptureAll()) == pytest.approx(0.75, abs=1e-12)

    def test_correct_guess_then_measure_is_not_free(self):
        # collapsing the register destroys the superposition even after a right guess
        p = adv.detection_probability(scenario(), CaptureAll(GUESS_THEN_MEASURE, PLUS4))
        assert 0 < p < 1


@pytest.mark.parametrize(
    "strategy",
    [
        Honest(),
        GuessDiffusion(),
        GuessDiffusion(ProductState.parse("+,-,+,-")),
        InterceptResend(),
        InterceptResend(MarkedSet((0, 1, 2, 4))),
        InterceptResend(None, ProductState.parse("-,+i,+,-i")),
        CaptureAll(),
        CaptureAll(GUESS_THEN_MEASURE),
    ],
    ids=lambda s: s.describe(),
)
def test_monte_carlo_within_three_sigma(strategy):
    rep = adv.exact_detection_probability(scenario(), strategy, mc_trials=100_000, seed=20240)
    assert rep.within_sigmas(3.0), (rep.detection, rep.mc_estimate, rep.sigma)


def test_monte_carlo_deterministic():
    sc = scenario()
    a = adv.monte_carlo_outcomes(sc, GuessDiffusion(), 500, 9)
    b = adv.monte_carlo_outcomes(sc, GuessDiffusion(), 500, 9)
    assert np.array_equal(a, b)


class TestTable1:
    def test_shorthand_rows(self):
        rows = adv.table1_report()
        sent = apply_oracle(expand_product(PLUS4), adv.TABLE1_DEFAULT_MARKED)
        for r in rows:
            if r.row in (2, 3, 4, 5, 6, 9, 10):
                assert r.shorthand
                assert r.decoded.allclose(-sent)
                assert r.render() == adv.SHORTHAND
            else:
                assert not r.shorthand

    def test_printed_rows(self):
        rows = {r.row: r for r in adv.table1_report()}
        for n, groups in ((7, ROW7), (8, ROW8)):
            np.testing.assert_allclose(rows[n].decoded.amplitudes, printed_vector(groups), atol=1e-9)

    def test_row_one_recovers_marked(self):
        r = adv.table1_report()[0]
        expected = np.zeros(16)
        expected[[1, 3, 5, 7]] = 0.5
        np.testing.assert_allclose(r.decoded.amplitudes, expected, atol=1e-12)

    def test_render_amplitude(self):
        assert adv.render_amplitude(complex(3 / 8, 1 / 8)) == "3/8+1/8i"
        assert adv.render_amplitude(complex(-1 / 8, -1 / 8)) == "-1/8-1/8i"
        assert adv.render_amplitude(0.5 + 0j) == "1/2"

    def test_needs_four_marked(self):
        with pytest.raises(ConfigurationError):
            adv.table1_report(MarkedSet((1, 2)))
