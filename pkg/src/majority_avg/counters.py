"""Majority algorithms instrumented to count colour-equality comparisons.

Only tests of one ball's colour against another's are counted.  Counter
arithmetic, list bookkeeping and the final ``count > n // 2`` checks are
free.  Each runner accepts a ColourStream or any sequence of colour ids.

MJRTY and the tournament can sometimes rule out a majority at the end of
phase 1 and skip verification, as their pseudocode does.  The average-case
formulas instead charge a full verification pass every time.  Passing
``always_verify=True`` runs verification anyway; the outcome is unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .streams import ColourStream

ALGORITHMS = ("mjrty", "fischer_salzberg", "tournament")


@dataclass(frozen=True)
class ComparisonTally:
    phase1: int
    phase2: int

    @property
    def total(self) -> int:
        return self.phase1 + self.phase2


@dataclass(frozen=True)
class AlgorithmResult:
    algorithm: str
    majority: int | None
    tally: ComparisonTally

    @property
    def has_majority(self) -> bool:
        return self.majority is not None


def _balls(stream: ColourStream | Sequence[int]) -> Sequence[int]:
    return stream.colours if isinstance(stream, ColourStream) else stream


def run_mjrty(stream: ColourStream | Sequence[int], always_verify: bool = False) -> AlgorithmResult:
    """Boyer and Moore's MJRTY with early exit from the verification pass."""
    xs = _balls(stream)
    n = len(xs)
    half = n // 2

    count = 0
    candidate = None
    phase1 = 0
    for x in xs:
        if count == 0:
            candidate = x
            count = 1
        else:
            phase1 += 1
            if x == candidate:
                count += 1
            else:
                count -= 1

    if count == 0 and not always_verify:
        return AlgorithmResult("mjrty", None, ComparisonTally(phase1, 0))

    count = 0
    phase2 = 0
    for x in xs:
        phase2 += 1
        if x == candidate:
            count += 1
            if count > half:
                return AlgorithmResult("mjrty", candidate, ComparisonTally(phase1, phase2))
    return AlgorithmResult("mjrty", None, ComparisonTally(phase1, phase2))


def run_fischer_salzberg(stream: ColourStream | Sequence[int], always_verify: bool = False) -> AlgorithmResult:
    """Fischer and Salzberg's list-and-bucket algorithm.

    Phase 1 builds a list with no two equal neighbours, parking balls that
    match the list tail in the bucket (every bucket ball shares the tail's
    colour).  Phase 2 walks the list from the tail: a ball equal to the
    candidate is discarded together with the ball below it, any other ball
    is discarded together with one bucket ball.  Needing a bucket ball when
    the bucket is empty proves there is no majority.  A candidate ball with
    nothing left below it (odd list, candidate in every second slot) is the
    majority without further comparisons.

    ``always_verify`` is accepted for interface symmetry; phase 2 always runs.
    """
    xs = _balls(stream)
    n = len(xs)
    if n == 0:
        return AlgorithmResult("fischer_salzberg", None, ComparisonTally(0, 0))

    lst = [xs[0]]
    bucket = []
    phase1 = 0
    for i in range(1, n):
        x = xs[i]
        phase1 += 1
        if x == lst[-1]:
            bucket.append(x)
        else:
            lst.append(x)
            if bucket:
                lst.append(bucket.pop())

    candidate = lst[-1]
    phase2 = 0
    while lst:
        ball = lst.pop()
        phase2 += 1
        if ball == candidate:
            if not lst:
                return AlgorithmResult("fischer_salzberg", candidate, ComparisonTally(phase1, phase2))
            lst.pop()
        elif bucket:
            bucket.pop()
        else:
            return AlgorithmResult("fischer_salzberg", None, ComparisonTally(phase1, phase2))
    majority = candidate if bucket else None
    return AlgorithmResult("fischer_salzberg", majority, ComparisonTally(phase1, phase2))


def run_tournament(stream: ColourStream | Sequence[int], always_verify: bool = False) -> AlgorithmResult:
    """Matula's tournament algorithm.

    Level ``i`` holds entries standing for ``2**i`` balls of one colour.
    Adjacent pairs at a level are compared: equal pairs merge into one entry
    at the next level, unequal pairs become discarded tuples tagged with the
    level, and an odd leftover stays behind as a singleton.  The singleton
    at the highest level is the candidate.  Verification compares every
    other singleton (level 0 included) to the candidate, then scans the
    tuples, testing the second member only when the first does not match.

    With no singleton left every colour was cancelled, so there is no
    majority.  ``always_verify`` then scans the tuples against the first
    ball of the highest level as a nominal candidate.
    """
    xs = _balls(stream)
    n = len(xs)
    phase1 = 0
    tuples: list[tuple[int, int, int]] = []
    singletons: list[tuple[int, int]] = []

    level = 0
    current = list(xs)
    while current:
        upper = []
        size = len(current)
        for j in range(0, size - 1, 2):
            a = current[j]
            b = current[j + 1]
            phase1 += 1
            if a == b:
                upper.append(a)
            else:
                tuples.append((a, b, level))
        if size % 2:
            singletons.append((level, current[-1]))
        current = upper
        level += 1

    if singletons:
        top_level, candidate = singletons[-1]
        count = 1 << top_level
    elif always_verify and tuples:
        top_level = tuples[-1][2]
        candidate = next(t[0] for t in tuples if t[2] == top_level)
        count = 0
    else:
        return AlgorithmResult("tournament", None, ComparisonTally(phase1, 0))

    phase2 = 0
    for lvl, ball in reversed(singletons[:-1]):
        phase2 += 1
        if ball == candidate:
            count += 1 << lvl
    for a, b, lvl in tuples:
        phase2 += 1
        if a == candidate:
            count += 1 << lvl
            continue
        phase2 += 1
        if b == candidate:
            count += 1 << lvl

    majority = candidate if count > n // 2 else None
    return AlgorithmResult("tournament", majority, ComparisonTally(phase1, phase2))


RUNNERS: dict[str, Callable[..., AlgorithmResult]] = {
    "mjrty": run_mjrty,
    "fischer_salzberg": run_fischer_salzberg,
    "tournament": run_tournament,
}


def run(algorithm: str, stream: ColourStream | Sequence[int], always_verify: bool = False) -> AlgorithmResult:
    try:
        runner = RUNNERS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}") from None
    return runner(stream, always_verify=always_verify)
