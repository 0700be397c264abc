"""Closed-form expected comparison counts and the exact oracles behind them.

Every expectation assumes a stream of ``n`` balls whose colours are drawn
independently and uniformly from ``m`` colours.  A strict majority means at
least ``n // 2 + 1`` balls of one colour.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceLimitError

ZEROS_CAP = 100_000
CATALAN_MAX_ROW = 30
# states whose probability falls below this are dropped from the DP
_DP_TAIL_EPS = 1e-22


@dataclass(frozen=True)
class Prediction:
    algorithm: str
    n: int
    m: int
    terms: dict[str, float] = field(default_factory=dict)
    # diagnostic quantities reported alongside the additive terms
    extras: dict[str, float] = field(default_factory=dict)

    @property
    def expected_total(self) -> float:
        return math.fsum(self.terms.values())


@dataclass(frozen=True)
class WalkParams:
    """Candidate-counter walk: up with p = 1/m, down with q = 1 - 1/m."""

    m: int

    @property
    def p(self) -> float:
        return 1.0 / self.m

    @property
    def q(self) -> float:
        return 1.0 - 1.0 / self.m


def _check_n_m(n: int, m: int, *, min_n: int, min_m: int) -> None:
    if n < min_n:
        raise DomainError(f"n must be >= {min_n}, got {n}")
    if m < min_m:
        raise DomainError(f"m must be >= {min_m}, got {m}")


# --- MJRTY -----------------------------------------------------------------

def hitting_time(m: int) -> float:
    """Expected steps for the counter walk to fall from 1 to 0: 1/(q - p) = m/(m-2)."""
    if m <= 2:
        raise DomainError(f"hitting time is infinite for m <= 2 (got m={m})")
    w = WalkParams(m)
    return 1.0 / (w.q - w.p)


def heuristic_zeros(n: int, m: int) -> float:
    """n / (1 + t): one zero per renewal cycle of length 1 + hitting_time."""
    return n / (1.0 + hitting_time(m))


def predict_mjrty(n: int, m: int) -> Prediction:
    _check_n_m(n, m, min_n=1, min_m=3)
    zeros = heuristic_zeros(n, m)
    return Prediction(
        "mjrty", n, m,
        terms={"phase1": n - zeros, "phase2": float(n), "constant": -1.0},
        extras={"expected_zeros": zeros, "hitting_time": hitting_time(m)},
    )


def expected_zeros_exact(n: int, m: int, cap: int = ZEROS_CAP) -> float:
    """Exact expected number of draws at which the MJRTY counter is zero.

    Propagates the counter's distribution draw by draw: from 0 it always
    moves to 1, from k >= 1 it moves up with probability 1/m and down
    otherwise.  States beyond the point where the remaining mass is
    negligible are trimmed; the accumulated error stays far below 1e-9.
    """
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n > cap:
        raise ResourceLimitError(f"n={n} exceeds the exact-zeros cap {cap}")
    p = 1.0 / m
    q = 1.0 - p
    dist = np.zeros(2)
    dist[0] = 1.0
    zeros = 0.0
    for _ in range(n):
        zeros += dist[0]
        nxt = np.zeros(dist.size + 1)
        nxt[1] += dist[0]
        nxt[2:] += p * dist[1:]
        nxt[:-2] += q * dist[1:]
        # trim negligible upper tail
        tail = np.cumsum(nxt[::-1])
        keep = nxt.size - int(np.searchsorted(tail, _DP_TAIL_EPS, side="right"))
        dist = nxt[: max(keep, 2)]
    return float(zeros)


def catalan_triangle(i: int, k: int) -> int:
    """Number of Dyck paths of length 2i that return to zero exactly k times.

    Uses T(i, k) = T(i, k+1) + T(i-1, k-1), with T(0, 0) = 1, T(i, 0) = 0
    for i > 0 and T(i, k) = 0 for k > i.
    """
    if not (0 <= k <= i <= CATALAN_MAX_ROW):
        raise DomainError(f"need 0 <= k <= i <= {CATALAN_MAX_ROW}, got i={i}, k={k}")
    return _catalan_rows(i)[i][k]


def _catalan_rows(last: int) -> list[list[int]]:
    rows = [[1]]
    for i in range(1, last + 1):
        prev = rows[-1]
        row = [0] * (i + 2)
        for k in range(i, 0, -1):
            row[k] = row[k + 1] + prev[k - 1]
        rows.append(row[: i + 1])
    return rows


# --- Tournament --------------------------------------------------------------

def tournament_first_phase(n: int, m: int) -> float:
    """Sum over rounds of n / (2**i m**(i-1)), i.e. mn / (2m - 1)."""
    _check_n_m(n, m, min_n=0, min_m=1)
    return m * n / (2 * m - 1)


def tournament_discarded(n: int, m: int) -> float:
    """Expected tuple comparisons: first-phase comparisons times P(unequal) times (2 - 1/m)."""
    _check_n_m(n, m, min_n=0, min_m=1)
    return tournament_first_phase(n, m) * (1 - 1 / m) * (2 - 1 / m)


def tournament_discarded_simplified(n: int, m: int) -> float:
    _check_n_m(n, m, min_n=0, min_m=1)
    return n * (m - 1) / m


def tournament_list_correction(n: int, m: int) -> float:
    """One comparison for every level i <= log2(n) whose size floor(n / (2m)**i) is odd."""
    _check_n_m(n, m, min_n=1, min_m=1)
    width = 2 * m
    odd = 0
    for i in range(n.bit_length()):
        odd += (n // width**i) % 2
    return float(odd)


def predict_tournament(n: int, m: int) -> Prediction:
    _check_n_m(n, m, min_n=1, min_m=2)
    return Prediction(
        "tournament", n, m,
        terms={
            "phase1": tournament_first_phase(n, m),
            "phase2_discarded": tournament_discarded(n, m),
            "phase2_lists": tournament_list_correction(n, m),
        },
    )


# --- binomial machinery -----------------------------------------------------

def _binomial_terms(n: int, p: float, anchor: int) -> tuple[np.ndarray, int, int]:
    """Unnormalised Binomial(n, p) pmf scaled so the term at ``anchor`` is 1.

    Built by the ratio recurrence t(x+1)/t(x) = (n-x)/(x+1) * p/q, walking
    outward from ``anchor`` and stopping once terms underflow.  Returns the
    terms with the x-range [lo, hi] they cover.
    """
    q = 1.0 - p
    ratio = p / q
    up = [1.0]
    t = 1.0
    x = anchor
    while x < n:
        t *= (n - x) / (x + 1) * ratio
        if t < 1e-300:
            break
        up.append(t)
        x += 1
    down = []
    t = 1.0
    x = anchor
    while x > 0:
        t *= x / (n - x + 1) / ratio
        if t < 1e-300:
            break
        down.append(t)
        x -= 1
    lo = anchor - len(down)
    return np.array(down[::-1] + up), lo, anchor + len(up) - 1


def _check_p(p: float) -> None:
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise DomainError(f"p must lie in [0, 1], got {p}")


def binomial_pmf_tail(n: int, p: float, k: int) -> float:
    """P(X >= k) for X ~ Binomial(n, p)."""
    _check_p(p)
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if not 0 <= k <= n + 1:
        raise DomainError(f"k must lie in [0, n+1], got {k}")
    if k == 0:
        return 1.0
    if k == n + 1:
        return 0.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    mode = min(n, int((n + 1) * p))
    terms, lo, _ = _binomial_terms(n, p, mode)
    start = max(k - lo, 0)
    upper = math.fsum(terms[start:].tolist())
    lower = math.fsum(terms[:start].tolist())
    total = upper + lower
    # subtract from whichever side is smaller for accuracy
    if upper <= lower:
        return upper / total
    return 1.0 - lower / total


def majority_threshold(n: int) -> int:
    return n // 2 + 1


def majority_probability(n: int, m: int) -> float:
    """P(some colour holds a strict majority); the m events are disjoint."""
    _check_n_m(n, m, min_n=1, min_m=2)
    return min(1.0, m * binomial_pmf_tail(n, 1.0 / m, majority_threshold(n)))


def conditional_majority_share(n: int, m: int) -> float:
    """E[X | X >= n//2 + 1] / n for X ~ Binomial(n, 1/m).

    Anchored at the threshold, so it stays finite even when the majority
    probability itself underflows.
    """
    _check_n_m(n, m, min_n=1, min_m=2)
    t = majority_threshold(n)
    p = 1.0 / m
    anchor = max(t, min(n, int((n + 1) * p)))
    terms, lo, _ = _binomial_terms(n, p, anchor)
    start = max(t - lo, 0)
    tail = terms[start:]
    xs = np.arange(lo + start, lo + start + tail.size, dtype=float)
    return math.fsum((xs * tail).tolist()) / (math.fsum(tail.tolist()) * n)


def majority_proportion_rho(n: int, m: int) -> float:
    """Expected fraction of balls in the majority colour, given a majority exists."""
    if majority_probability(n, m) == 0.0:
        raise DomainError(f"majority probability underflows for n={n}, m={m}")
    return conditional_majority_share(n, m)


# --- Fischer-Salzberg --------------------------------------------------------

def predict_fischer_salzberg(n: int, m: int) -> Prediction:
    """(n-1) + P * n(1 - rho) + (1 - P) * B, B = n/2 for two colours else m/(m-1)."""
    _check_n_m(n, m, min_n=1, min_m=2)
    p_maj = majority_probability(n, m)
    rho = conditional_majority_share(n, m)
    no_majority_cost = n / 2 if m == 2 else m / (m - 1)
    return Prediction(
        "fischer_salzberg", n, m,
        terms={
            "phase1": float(n - 1),
            "majority_branch": p_maj * n * (1.0 - rho),
            "no_majority_branch": (1.0 - p_maj) * no_majority_cost,
        },
        extras={"p_majority": p_maj, "rho": rho},
    )


PREDICTORS = {
    "mjrty": predict_mjrty,
    "fischer_salzberg": predict_fischer_salzberg,
    "tournament": predict_tournament,
}


def predict(algorithm: str, n: int, m: int) -> Prediction:
    try:
        fn = PREDICTORS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}") from None
    return fn(n, m)
