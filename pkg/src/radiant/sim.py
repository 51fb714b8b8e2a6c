"""Monte-Carlo walker engine.

Walkers are assigned a discipline by the notable shares, a start city by
population weight within their discipline's level, and a trip count from a
geometric law; they then move by categorical draws from successive kernel
rows. Everything is driven by one 64-bit seed: replicate r uses the
sub-seed seed XOR r, so replicates are independent, reproducible, and
embarrassingly parallel. Results are merged in replicate order, which makes
the output identical at any thread count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np


class EmptyLevelSupportError(Exception):
    """A walker's level has no positive start-city weight."""


@dataclass
class SimConfig:
    walkers: int = 2000
    replicates: int = 500
    trip_p: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.walkers < 1:
            raise ValueError("walkers must be >= 1")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not 0.0 < self.trip_p <= 1.0:
            raise ValueError(f"trip-count parameter must be in (0,1]: {self.trip_p}")


@dataclass
class SimTrajectory:
    walker: int
    discipline: str
    cities: list  # city ids, start city + k jumps (self-transitions recorded)


@dataclass
class _LevelSampler:
    """Precomputed cumulative tables for one level."""
    label: str
    city_ids: list
    cum_rows: np.ndarray      # per-row cumulative kernel probabilities
    cum_start: np.ndarray     # cumulative population weights

    @classmethod
    def from_level(cls, level):
        if level.kernel is None:
            raise ValueError(f"level {level.label!r} has no kernel built")
        pop = np.asarray(level.populations, dtype=float)
        total = pop.sum()
        if not total > 0:
            raise EmptyLevelSupportError(
                f"level {level.label!r} has no population mass to start from")
        return cls(label=level.label, city_ids=list(level.city_ids),
                   cum_rows=np.cumsum(level.kernel.matrix, axis=1),
                   cum_start=np.cumsum(pop / total))


def _draw_index(cum, rng):
    # inverse-CDF draw; clip guards the final cumsum rounding short of 1.0
    k = int(np.searchsorted(cum, rng.random(), side="right"))
    return min(k, len(cum) - 1)


def _run_replicate(replicate, config, samplers, cum_shares):
    rng = np.random.Generator(np.random.PCG64(config.seed ^ replicate))
    trajectories = []
    for w in range(config.walkers):
        if len(samplers) == 1:
            level = samplers[0]
        else:
            level = samplers[_draw_index(cum_shares, rng)]
        cur = _draw_index(level.cum_start, rng)
        k = int(rng.geometric(config.trip_p))    # support k >= 1
        seq = [cur]
        for _ in range(k):
            cur = _draw_index(level.cum_rows[cur], rng)
            seq.append(cur)
        trajectories.append(SimTrajectory(
            walker=w, discipline=level.label,
            cities=[level.city_ids[c] for c in seq]))
    return trajectories


def iter_replicates(config, model, threads=1):
    """Yield each replicate's trajectory list, in replicate order.

    `model` is a radiation.MultilevelKernel (one level for the single-level
    configurations). Deterministic for a given (seed, config, kernel)
    regardless of `threads`.
    """
    samplers = [_LevelSampler.from_level(l) for l in model.levels]
    shares = np.array([l.ns_share for l in model.levels], dtype=float)
    cum_shares = np.cumsum(shares / shares.sum())
    reps = range(config.replicates)
    if threads <= 1:
        for r in reps:
            yield _run_replicate(r, config, samplers, cum_shares)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            yield from pool.map(
                lambda r: _run_replicate(r, config, samplers, cum_shares), reps)


def run_ensemble(config, model, threads=1):
    """All replicates, materialized: a list of lists of SimTrajectory."""
    return list(iter_replicates(config, model, threads=threads))
