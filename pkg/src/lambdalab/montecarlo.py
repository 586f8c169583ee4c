"""Seeded Monte Carlo simulation of probabilistic reduction.

The pseudo-random generator is pinned: SplitMix64 (Steele, Lea & Flood's
64-bit mixer, the de-facto standard seeding generator), one instance per
run, seeded with that run's 64-bit seed.  A step whose distribution has
common denominator den consumes uniform draws below den produced by
top-bits rejection, so a branch with probability num/den is taken with
exactly that probability; Dirac steps consume no randomness.  Golden tests
depend on this scheme; never change it silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .pars import _TransitionCache
from .strategies import StepCount, Strategy
from .terms import CanonicalTerm, Term

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """64-bit state, 64-bit outputs; platform-independent integer ops only."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Exactly uniform draw in range(n): top-bits rejection."""
        k = (n - 1).bit_length()
        shift = 64 - k
        while True:
            r = self.next_u64() >> shift
            if r < n:
                return r


@dataclass(frozen=True)
class RunResult:
    """One sampled trajectory: step count and final class (None on cutoff)."""

    steps: StepCount
    final: Optional[CanonicalTerm]
    seed: int


@dataclass(frozen=True)
class Estimate:
    """Summary of a batch of runs; the mean excludes cutoff runs."""

    sample_count: int
    cutoff_count: int
    mean: float
    sample_variance: float
    confidence_halfwidth_95: float


class _Sampler:
    """Transition rows compiled into exact integer sampling tables.

    A table is None for a normal form, ("dirac", target) when no draw is
    needed, and ("draw", den, cums, targets) otherwise: a uniform draw in
    range(den) selects the first index whose cumulative numerator exceeds it.
    """

    def __init__(self, strategy: Strategy):
        self._cache = _TransitionCache(strategy)
        self._tables: dict[CanonicalTerm, Optional[tuple]] = {}

    def add_root(self, t: Term) -> CanonicalTerm:
        return self._cache.add_root(t)

    def rep(self, c: CanonicalTerm) -> Term:
        return self._cache.reps[c]

    def table(self, c: CanonicalTerm) -> Optional[tuple]:
        if c in self._tables:
            return self._tables[c]
        row = self._cache.row(c)
        if row is None:
            table = None
        elif len(row) == 1:
            table = ("dirac", row[0][0])
        else:
            den = 1
            for _, p in row:
                den = math.lcm(den, p.denominator)
            cums, targets, acc = [], [], 0
            for target, p in row:
                acc += p.numerator * (den // p.denominator)
                cums.append(acc)
                targets.append(target)
            assert acc == den, "strategy masses must sum to 1"
            table = ("draw", den, cums, targets)
        self._tables[c] = table
        return table

    def run(
        self, origin: CanonicalTerm, seed: int, max_steps: int
    ) -> tuple[Optional[int], Optional[CanonicalTerm]]:
        """(steps, final class), or (None, None) when cut off."""
        rng = SplitMix64(seed)
        state = origin
        for n in range(max_steps + 1):
            table = self.table(state)
            if table is None:
                return n, state
            if n == max_steps:
                return None, None
            if table[0] == "dirac":
                state = table[1]
            else:
                _, den, cums, targets = table
                draw = rng.below(den)
                for i, cum in enumerate(cums):
                    if draw < cum:
                        state = targets[i]
                        break
        return None, None


def sample_run(
    t: Term,
    strategy: Strategy,
    seed: int,
    max_steps: int,
    _sampler: Optional[_Sampler] = None,
) -> RunResult:
    """One seeded trajectory of the strategy, cut off after max_steps."""
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    sampler = _sampler if _sampler is not None else _Sampler(strategy)
    steps, final = sampler.run(sampler.add_root(t), seed, max_steps)
    if steps is None:
        return RunResult(StepCount.exhausted(max_steps), None, seed)
    return RunResult(StepCount.reached(steps), final, seed)


def estimate(
    t: Term,
    strategy: Strategy,
    base_seed: int,
    n: int,
    max_steps: int,
) -> Estimate:
    """n independent runs with seeds base_seed..base_seed+n-1.

    A pure function of its arguments: transitions are memoized across runs
    but each run draws only from its own generator, so the result is the
    same as n isolated sample_run calls.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    sampler = _Sampler(strategy)
    origin = sampler.add_root(t)
    run = sampler.run
    finite_steps: list[int] = []
    cutoff_count = 0
    for i in range(n):
        steps, _ = run(origin, base_seed + i, max_steps)
        if steps is None:
            cutoff_count += 1
        else:
            finite_steps.append(steps)
    m = len(finite_steps)
    if m == 0:
        return Estimate(n, cutoff_count, 0.0, 0.0, 0.0)
    mean = sum(finite_steps) / m
    if m > 1:
        variance = sum((x - mean) ** 2 for x in finite_steps) / (m - 1)
    else:
        variance = 0.0
    halfwidth = 1.96 * math.sqrt(variance / m)
    return Estimate(n, cutoff_count, mean, variance, halfwidth)
