"""Seeded sampling of joint outcomes.

Uniform variates come from SplitMix64 so counts are reproducible bit for bit
on any platform and in any language. The generator's state transition is::

    state_{k+1} = state_k + 0x9E3779B97F4A7C15            (mod 2**64)
    z = state_{k+1}
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9              (mod 2**64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB              (mod 2**64)
    output = z ^ (z >> 31)

with ``state_0 = seed``. A draw is ``(output >> 11) * 2**-53`` in [0, 1) and
is mapped to a cell by inverse CDF over the order ``(++, +-, -+, --)``.
Cells whose analytic probability is below ``ZERO_CELL`` are removed before
building the CDF, so they can never be drawn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import OUTCOME_PAIRS, JointDistribution, SpinObservable, StateVector, joint_distribution

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1
ZERO_CELL = 1e-12


class SplitMix64:
    """Scalar reference generator; :func:`splitmix64_block` is the fast path."""

    def __init__(self, seed: int):
        self.state = _check_seed(seed)

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK64
        z = ((z ^ (z >> 27)) * MIX2) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed {seed} is not a 64-bit unsigned integer")
    return seed


def splitmix64_block(seed: int, n: int, start: int = 0) -> np.ndarray:
    """Outputs ``start .. start+n-1`` of the stream, as uint64."""
    seed = _check_seed(seed)
    k = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + k * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, n: int) -> np.ndarray:
    return (splitmix64_block(seed, n) >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class SampleCounts:
    n: int
    counts: dict
    seed: int
    settings: tuple[SpinObservable, SpinObservable]

    def __post_init__(self) -> None:
        if sum(self.counts.values()) != self.n:
            raise ValueError("counts do not add up to n")

    def as_array(self) -> np.ndarray:
        return np.array([self.counts[k] for k in OUTCOME_PAIRS])


def _cell_indices(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    live = np.flatnonzero(probs >= ZERO_CELL)
    p = probs[live] / probs[live].sum()
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    pick = np.searchsorted(cdf, u, side="right")
    return live[pick]


def sample_joint(
    state: StateVector,
    obs_l: SpinObservable,
    obs_r: SpinObservable,
    n: int,
    seed: int,
) -> SampleCounts:
    if n < 1:
        raise ValueError("n must be at least 1")
    dist = joint_distribution(state, obs_l, obs_r)
    cells = _cell_indices(dist.as_array(), uniforms(seed, n))
    tally = np.bincount(cells, minlength=4)
    counts = {k: int(c) for k, c in zip(OUTCOME_PAIRS, tally)}
    return SampleCounts(n, counts, int(seed), (obs_l, obs_r))


def sample_joint_sharded(
    state: StateVector,
    obs_l: SpinObservable,
    obs_r: SpinObservable,
    n: int,
    seed: int,
    shards: int,
) -> SampleCounts:
    """Split ``n`` draws over ``shards`` streams seeded ``seed + shard_index``.

    Counts differ from the single-stream :func:`sample_joint` for the same seed.
    """
    sizes = [n // shards + (i < n % shards) for i in range(shards)]
    total = dict.fromkeys(OUTCOME_PAIRS, 0)
    for i, size in enumerate(sizes):
        if size == 0:
            continue
        part = sample_joint(state, obs_l, obs_r, size, (seed + i) & MASK64)
        for k, v in part.counts.items():
            total[k] += v
    return SampleCounts(n, total, int(seed), (obs_l, obs_r))


@dataclass(frozen=True)
class CellReport:
    cell: tuple
    count: int
    frequency: float
    probability: float
    z: float


def frequency_report(counts: SampleCounts, analytic: JointDistribution) -> list[CellReport]:
    """Per-cell frequency against the Born probability.

    ``z`` is ``(freq - p) / sqrt(p (1 - p) / n)``. For ``p`` in {0, 1} it is 0
    when the frequency agrees exactly and ``inf`` otherwise.
    """
    if counts.settings != analytic.settings:
        raise ValueError("sample and analytic table were taken with different settings")
    out = []
    for cell in OUTCOME_PAIRS:
        k = counts.counts[cell]
        freq = k / counts.n
        p = analytic[cell]
        if p < ZERO_CELL or p > 1 - ZERO_CELL:
            exact = 0.0 if p < ZERO_CELL else 1.0
            z = 0.0 if freq == exact else math.inf
        else:
            z = (freq - p) / math.sqrt(p * (1 - p) / counts.n)
        out.append(CellReport(cell, k, freq, p, z))
    return out
