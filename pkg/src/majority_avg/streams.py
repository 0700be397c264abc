"""Colour streams: seeded generation, exhaustive enumeration, ground truth.

Random streams come from SplitMix64 run in counter mode: output ``i`` of a
stream seeded with ``s`` is ``mix64(s + (i + 1) * 0x9E3779B97F4A7C15)``.
Each 64-bit output is split into two 32-bit words (low word first) and
mapped to a colour by rejection sampling, so every colour is exactly
equiprobable.  Everything is fixed-width integer arithmetic, which makes the
streams bit-identical on every platform.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import ResourceLimitError

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
ENUMERATION_CAP = 1 << 24

_U64 = np.uint64


@dataclass(frozen=True)
class ColourStream:
    colours: tuple[int, ...]
    m: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"colour count must be positive, got {self.m}")
        for c in self.colours:
            if not 0 <= c < self.m:
                raise ValueError(f"colour {c} outside [0, {self.m})")

    @classmethod
    def of(cls, colours: Sequence[int], m: int | None = None) -> "ColourStream":
        colours = tuple(int(c) for c in colours)
        if m is None:
            m = max(colours, default=0) + 1
        return cls(colours, m)

    @property
    def n(self) -> int:
        return len(self.colours)

    def __len__(self) -> int:
        return len(self.colours)

    def __iter__(self) -> Iterator[int]:
        return iter(self.colours)


def mix64(z: int) -> int:
    """SplitMix64 finaliser; a bijection on 64-bit words."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> _U64(30))
    z = z * _U64(0xBF58476D1CE4E5B9)
    z = z ^ (z >> _U64(27))
    z = z * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def splitmix64_words(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start .. start+count-1`` of the counter-mode SplitMix64 stream."""
    idx = np.arange(start + 1, start + count + 1, dtype=_U64)
    with np.errstate(over="ignore"):
        return _mix64_array(_U64(seed & MASK64) + idx * _U64(GOLDEN_GAMMA))


def generate_colours(length: int, colours: int, seed: int) -> np.ndarray:
    """Uniform i.i.d. colour ids as an int64 array (the raw form of generate_stream)."""
    if colours < 1:
        raise ValueError(f"colours must be >= 1, got {colours}")
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    if colours == 1 or length == 0:
        return np.zeros(length, dtype=np.int64)
    if colours >= 1 << 32:
        raise ValueError("colours must be < 2**32")
    # accept 32-bit words below the largest multiple of `colours`
    limit = (1 << 32) - (1 << 32) % colours
    out: list[np.ndarray] = []
    have = 0
    counter = 0
    while have < length:
        need = length - have
        block = need // 2 + 8
        words = splitmix64_words(seed, counter, block)
        counter += block
        halves = np.empty(2 * block, dtype=_U64)
        halves[0::2] = words & _U64(0xFFFFFFFF)
        halves[1::2] = words >> _U64(32)
        accepted = halves[halves < _U64(limit)]
        out.append((accepted % _U64(colours)).astype(np.int64))
        have += accepted.size
    return np.concatenate(out)[:length]


def generate_stream(length: int, colours: int, seed: int) -> ColourStream:
    return ColourStream(tuple(generate_colours(length, colours, seed).tolist()), colours)


def stream_count(length: int, colours: int) -> int:
    return colours ** length


def enumerate_streams(length: int, colours: int, cap: int = ENUMERATION_CAP) -> Iterator[ColourStream]:
    """Every stream of the given length over ``colours`` colours, lexicographically.

    Raises ResourceLimitError when colours**length exceeds ``cap``.
    """
    if colours < 1:
        raise ValueError(f"colours must be >= 1, got {colours}")
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    total = stream_count(length, colours)
    if total > cap:
        raise ResourceLimitError(
            f"{colours}**{length} = {total} streams exceeds enumeration cap {cap}"
        )
    # validate once, skip per-stream checks
    for combo in itertools.product(range(colours), repeat=length):
        stream = object.__new__(ColourStream)
        object.__setattr__(stream, "colours", combo)
        object.__setattr__(stream, "m", colours)
        yield stream


def brute_force_majority(stream: ColourStream | Sequence[int]) -> int | None:
    """The colour held by more than half the balls, or None."""
    colours = stream.colours if isinstance(stream, ColourStream) else stream
    if not colours:
        return None
    colour, count = Counter(colours).most_common(1)[0]
    return colour if count > len(colours) // 2 else None


def derive_trial_seed(master_seed: int, cell_id: int, trial_index: int) -> int:
    """Seed for one trial of one experiment cell.

    ``(cell_id, trial_index)`` is packed into one 64-bit word (cell in the
    high half, trial in the low half), scrambled by ``mix64``, XORed with the
    master seed and scrambled again.  Both steps are bijections, so for a
    fixed master seed distinct pairs with components in ``[0, 2**32)`` never
    collide.
    """
    if not (0 <= cell_id < 1 << 32 and 0 <= trial_index < 1 << 32):
        raise ValueError("cell_id and trial_index must lie in [0, 2**32)")
    packed = (cell_id << 32) | trial_index
    return mix64((master_seed & MASK64) ^ mix64(packed))
