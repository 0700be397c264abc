import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import binom

from majority_avg import predictors as P
from majority_avg.errors import DomainError, ResourceLimitError


# --- oracles -------------------------------------------------------------

def enum_majority_stats(n, m):
    """(P(majority), E[majority share | majority]) by enumerating all m**n streams."""
    hits = 0
    share = Fraction(0)
    for s in itertools.product(range(m), repeat=n):
        top = max(s.count(c) for c in range(m))
        if 2 * top > n:
            hits += 1
            share += Fraction(top, n)
    total = m**n
    return Fraction(hits, total), (share / hits if hits else None)


def enum_expected_zeros(n, m):
    """Mean number of MJRTY loop entries with a zero counter over all m**n streams."""
    acc = 0
    for s in itertools.product(range(m), repeat=n):
        count, cand = 0, None
        for x in s:
            if count == 0:
                acc += 1
                cand, count = x, 1
            else:
                count += 1 if x == cand else -1
    return Fraction(acc, m**n)


def dyck_returns(i):
    """Histogram of returns to zero over all Dyck paths of length 2i."""
    hist = [0] * (i + 1)
    for steps in itertools.product((1, -1), repeat=2 * i):
        h, returns, ok = 0, 0, True
        for st_ in steps:
            h += st_
            if h < 0:
                ok = False
                break
            returns += h == 0
        if ok and h == 0:
            hist[returns] += 1
    return hist


def catalan(i):
    c = [1]
    for k in range(i):
        c.append(sum(c[j] * c[k - j] for j in range(k + 1)))
    return c[i]


# --- hitting time / MJRTY -----------------------------------------------------

@pytest.mark.parametrize("m,expected", [(3, 3.0), (4, 2.0), (10, 1.25)])
def test_hitting_time(m, expected):
    assert P.hitting_time(m) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_hitting_time_domain(m):
    with pytest.raises(DomainError):
        P.hitting_time(m)


@pytest.mark.parametrize(
    "n,m,expected",
    [(1000, 3, 1749.0), (100, 4, 200 - 1 - 100 / 3), (1, 3, 0.75)],
)
def test_predict_mjrty(n, m, expected):
    pred = P.predict_mjrty(n, m)
    assert pred.expected_total == pytest.approx(expected, rel=1e-12)
    assert pred.terms["phase2"] == n
    assert pred.extras["expected_zeros"] == pytest.approx(n * (m - 2) / (2 * m - 2))


def test_predict_mjrty_two_colours_rejected():
    with pytest.raises(DomainError):
        P.predict_mjrty(100, 2)


def test_expected_zeros_small():
    assert P.expected_zeros_exact(0, 3) == 0.0
    assert P.expected_zeros_exact(1, 7) == 1.0
    assert P.expected_zeros_exact(2, 7) == 1.0
    assert P.expected_zeros_exact(3, 3) == 5 / 3


@pytest.mark.parametrize("n,m", [(n, m) for m in (2, 3, 4) for n in range(1, 9)])
def test_expected_zeros_matches_enumeration(n, m):
    assert abs(P.expected_zeros_exact(n, m) - float(enum_expected_zeros(n, m))) < 1e-12


@pytest.mark.parametrize("m", [3, 5, 10])
def test_zero_heuristic_within_one_percent(m):
    exact = P.expected_zeros_exact(10_000, m)
    assert abs(P.heuristic_zeros(10_000, m) - exact) / exact < 0.01


def test_expected_zeros_cap():
    with pytest.raises(ResourceLimitError):
        P.expected_zeros_exact(100_001, 3)
    with pytest.raises(DomainError):
        P.expected_zeros_exact(10, 1)


def test_expected_zeros_long_symmetric_walk():
    # m = 2 needs the widest state vector; zeros grow like sqrt(n)
    z = P.expected_zeros_exact(20_000, 2)
    assert 100 < z < 200


# --- Catalan triangle -------------------------------------------------------

def test_catalan_triangle_examples():
    assert P.catalan_triangle(0, 0) == 1
    assert P.catalan_triangle(2, 1) == dyck_returns(2)[1] == 1
    assert [sum(P.catalan_triangle(i, k) for k in range(i + 1)) for i in range(5)] == [1, 1, 2, 5, 14]


@pytest.mark.parametrize("i", range(0, 9))
def test_catalan_triangle_matches_path_enumeration(i):
    assert [P.catalan_triangle(i, k) for k in range(i + 1)] == dyck_returns(i)


@pytest.mark.parametrize("i", range(16))
def test_catalan_row_sums(i):
    assert sum(P.catalan_triangle(i, k) for k in range(i + 1)) == catalan(i)


@pytest.mark.parametrize("i,k", [(-1, 0), (2, 3), (31, 1), (3, -1)])
def test_catalan_domain(i, k):
    with pytest.raises(DomainError):
        P.catalan_triangle(i, k)


# --- Tournament --------------------------------------------------------------

def test_tournament_terms():
    assert P.tournament_first_phase(1000, 2) == pytest.approx(2000 / 3)
    assert P.tournament_first_phase(1000, 10) == pytest.approx(10000 / 19)
    assert P.tournament_first_phase(1000, 10**6) == pytest.approx(500.0, rel=1e-3)
    assert P.tournament_discarded(1000, 2) == pytest.approx(500.0, rel=1e-12)
    assert P.tournament_discarded(1000, 10) == pytest.approx(900.0, rel=1e-12)
    assert P.tournament_discarded(123, 1) == 0.0
    assert P.tournament_list_correction(1000, 2) == 2.0
    assert P.tournament_list_correction(1, 5) == 1.0
    assert P.tournament_list_correction(4, 2) == 1.0


def test_first_phase_series_sum():
    n, m = 1000, 3
    series = math.fsum(n / (2**i * m ** (i - 1)) for i in range(1, 200))
    assert P.tournament_first_phase(n, m) == pytest.approx(series, rel=1e-12)


@given(st.integers(0, 10**7), st.integers(1, 10**4))
def test_discarded_identity(n, m):
    lhs = P.tournament_discarded(n, m)
    rhs = P.tournament_discarded_simplified(n, m)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_predict_tournament_sum():
    pred = P.predict_tournament(1000, 2)
    assert pred.expected_total == pytest.approx(2000 / 3 + 500 + 2, rel=1e-12)
    pred = P.predict_tournament(1000, 10)
    assert pred.expected_total == pytest.approx(
        10000 / 19 + 900 + P.tournament_list_correction(1000, 10), rel=1e-12
    )
    assert abs(pred.expected_total - math.fsum(pred.terms.values())) < 1e-9


# --- binomial / majority -----------------------------------------------------

def test_binomial_tail_examples():
    assert P.binomial_pmf_tail(4, 0.5, 3) == pytest.approx(5 / 16, abs=1e-15)
    assert P.binomial_pmf_tail(17, 0.3, 0) == 1.0
    assert P.binomial_pmf_tail(17, 0.3, 18) == 0.0
    assert P.binomial_pmf_tail(5, 0.0, 1) == 0.0
    assert P.binomial_pmf_tail(5, 1.0, 5) == 1.0


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_binomial_tail_domain(p):
    with pytest.raises(DomainError):
        P.binomial_pmf_tail(10, p, 3)


@pytest.mark.parametrize("n", [1, 7, 12])
@pytest.mark.parametrize("p", [0.1, 1 / 3, 0.5, 0.9])
def test_binomial_tail_exact_rational(n, p):
    q = Fraction(p).limit_denominator(10)
    for k in range(n + 2):
        exact = sum(
            math.comb(n, x) * q**x * (1 - q) ** (n - x) for x in range(k, n + 1)
        )
        assert abs(P.binomial_pmf_tail(n, float(q), k) - float(exact)) < 1e-14


@pytest.mark.parametrize("n", [100, 1000, 10_000])
@pytest.mark.parametrize("p", [0.1, 1 / 3, 0.5])
def test_binomial_tail_against_scipy(n, p):
    for k in np.linspace(0, n + 1, 23).astype(int):
        assert abs(P.binomial_pmf_tail(n, p, int(k)) - binom.sf(k - 1, n, p)) < 1e-12


@pytest.mark.parametrize("n,m,expected", [(3, 2, 1.0), (4, 2, 0.625), (2, 3, 1 / 3)])
def test_majority_probability_examples(n, m, expected):
    assert P.majority_probability(n, m) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("n,m,expected", [(1, 4, 1.0), (3, 2, 0.75), (2, 2, 1.0)])
def test_rho_examples(n, m, expected):
    assert P.majority_proportion_rho(n, m) == pytest.approx(expected, abs=1e-15)


ENUM_CASES = [(n, m) for m in (2, 3) for n in range(1, 11)] + [(n, 4) for n in range(1, 7)]


@pytest.mark.parametrize("n,m", ENUM_CASES)
def test_majority_stats_match_enumeration(n, m):
    p_maj, rho = enum_majority_stats(n, m)
    assert abs(P.majority_probability(n, m) - float(p_maj)) < 1e-12
    assert abs(P.majority_proportion_rho(n, m) - float(rho)) < 1e-12


def test_rho_underflow_is_domain_error():
    with pytest.raises(DomainError):
        P.majority_proportion_rho(5000, 10)
    # the conditional share stays finite for the predictor
    assert 0.5 < P.conditional_majority_share(5000, 10) <= 1.0


# --- Fischer-Salzberg --------------------------------------------------------

def test_predict_fischer_salzberg_examples():
    assert P.predict_fischer_salzberg(2, 2).expected_total == pytest.approx(1.5, abs=1e-15)
    assert P.predict_fischer_salzberg(3, 2).expected_total == pytest.approx(2.75, abs=1e-15)
    pred = P.predict_fischer_salzberg(1000, 10)
    assert pred.extras["p_majority"] < 1e-100
    assert P.binomial_pmf_tail(1000, 0.1, 501) < 1e-100
    assert pred.expected_total == pytest.approx(999 + 10 / 9, rel=1e-12)


@given(
    st.sampled_from(["mjrty", "fischer_salzberg", "tournament"]),
    st.integers(2, 20_000),
    st.integers(2, 50),
)
def test_predictions_bounded(algorithm, n, m):
    if algorithm == "mjrty" and m == 2:
        return
    pred = P.predict(algorithm, n, m)
    total = pred.expected_total
    assert 0 <= total <= 2 * n
    assert total == pytest.approx(math.fsum(pred.terms.values()), rel=1e-9)


def test_tournament_single_ball_exceeds_two_n():
    # the series sums to infinity, so a single ball is charged 2/3 + 1/2 + 1 comparisons
    assert P.predict_tournament(1, 2).expected_total == pytest.approx(2 / 3 + 0.5 + 1.0)
    assert P.predict_mjrty(1, 3).expected_total <= 2
    assert P.predict_fischer_salzberg(1, 2).expected_total == 0.0


# --- Monte-Carlo cross checks (vectorised, independent of the DP) ---------

def first_passage_steps(m, walks, rng):
    """Steps for a walk (up 1/m, down otherwise) started at 1 to hit 0."""
    pos = np.ones(walks, dtype=np.int64)
    steps = np.zeros(walks, dtype=np.int64)
    alive = np.ones(walks, dtype=bool)
    while alive.any():
        idx = np.flatnonzero(alive)
        up = rng.random(idx.size) < 1.0 / m
        pos[idx] += np.where(up, 1, -1)
        steps[idx] += 1
        alive[idx] = pos[idx] > 0
    return steps


@pytest.mark.parametrize("m", [3, 4, 10])
def test_hitting_time_monte_carlo(m):
    rng = np.random.default_rng(1000 + m)
    steps = first_passage_steps(m, 1_000_000, rng)
    se = steps.std(ddof=1) / math.sqrt(steps.size)
    assert abs(steps.mean() - P.hitting_time(m)) < 3 * se
