"""Counter-based random streams.

Every stream is a Philox generator keyed by ``(seed, domain, index)``. The
raw 64-bit outputs are consumed in order, four per counter step, so output
``n`` of a stream can be reproduced without generating its predecessors by
advancing the counter ``n // 4`` steps.
"""

from enum import IntEnum
from typing import Sequence, Union

import numpy as np
from scipy import special

TWO_PI = 2.0 * np.pi
_DOUBLE_SCALE = 1.0 / 9007199254740992.0  # 2**-53
_LANES = 4
_MAX_GAP = 1 << 16

ArrayLike = Union[Sequence[int], np.ndarray]


class Stream(IntEnum):
    """Seed domains; streams of different domains never share a key."""

    PHASE = 0
    PHANTOM = 1
    NOISE = 2
    TRIAL = 3
    THEORY = 4


def _key(seed: int, domain: Stream, index: int) -> np.ndarray:
    seq = np.random.SeedSequence([int(seed), int(domain), int(index)])
    return seq.generate_state(2, dtype=np.uint64)


def bit_generator(seed: int, domain: Stream, index: int) -> np.random.Philox:
    """Philox bit generator for one stream."""
    return np.random.Philox(key=_key(seed, domain, index))


def generator(seed: int, domain: Stream, index: int) -> np.random.Generator:
    """numpy Generator over one stream (used for Gaussian noise)."""
    return np.random.Generator(bit_generator(seed, domain, index))


def _to_unit(raw: np.ndarray) -> np.ndarray:
    return (raw >> np.uint64(11)).astype(np.float64) * _DOUBLE_SCALE


def uniform_phases(seed: int, domain: Stream, index: int, count: int) -> np.ndarray:
    """First ``count`` phases of a stream, uniform on [0, 2π)."""
    if count <= 0:
        return np.zeros(0)
    raw = bit_generator(seed, domain, index).random_raw(count)
    return _to_unit(np.asarray(raw, dtype=np.uint64)) * TWO_PI


def raw_at(
    seed: int, domain: Stream, index: int, positions: ArrayLike
) -> np.ndarray:
    """Raw 64-bit outputs at arbitrary stream positions.

    Positions are grouped into runs no sparser than ``_MAX_GAP``; each run
    is one counter jump followed by a contiguous block draw.
    """
    wanted = np.asarray(positions, dtype=np.int64)
    if wanted.size == 0:
        return np.zeros(wanted.shape, dtype=np.uint64)
    if wanted.min() < 0:
        raise IndexError("stream position must be non-negative")
    unique = np.unique(wanted)
    values = np.empty(unique.size, dtype=np.uint64)
    cuts = np.flatnonzero(np.diff(unique) > _MAX_GAP) + 1
    for run in np.split(np.arange(unique.size), cuts):
        first = int(unique[run[0]])
        base = first - first % _LANES
        bitgen = bit_generator(seed, domain, index)
        bitgen.advance(base // _LANES)
        block = bitgen.random_raw(int(unique[run[-1]]) - base + 1)
        values[run] = np.asarray(block, dtype=np.uint64)[unique[run] - base]
    return values[np.searchsorted(unique, wanted)]


def gaussian_at(
    seed: int, domain: Stream, index: int, positions: ArrayLike
) -> np.ndarray:
    """Standard normal values keyed by stream position (inverse-CDF transform)."""
    raw = raw_at(seed, domain, index, positions)
    # midpoint of the 2**-53 cell keeps the argument inside (0, 1)
    unit = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _DOUBLE_SCALE
    return special.ndtri(unit)


def pulse_phase(seed: int, m: int, n: int) -> float:
    """Phase of pulse ``n`` at sweep point ``m`` by direct counter access."""
    if n < 0:
        raise IndexError("pulse index must be non-negative")
    return float(_to_unit(raw_at(seed, Stream.PHASE, m, [n]))[0] * TWO_PI)


def trial_seed(seed: int, trial: int) -> int:
    """Independent seed for Monte Carlo trial ``trial`` of a base seed."""
    seq = np.random.SeedSequence([int(seed), int(Stream.TRIAL), int(trial)])
    return int(seq.generate_state(1, dtype=np.uint32)[0])
