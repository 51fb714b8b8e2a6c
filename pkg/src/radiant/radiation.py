"""Radiation-model transition kernels.

A kernel row gives the probability of moving from city i to every city j,
including i itself (the self-transition is the probability of staying put).
The unnormalized weight of a move is

    w_ij = a_j / ((a_i + s_ij) * (a_i + a_j + s_ij))

where a is the per-city attractiveness (population, notable count, their
combination, or uniform) and s_ij is the intervening mass: the total
attractiveness of cities strictly closer to i than j is, excluding both
endpoints (open ball; cities tied at exactly r_ij are excluded). Rows are
normalized to probabilities. s_ii = 0, so the self-weight is 1/(2 a_i).

The model is parameter-free: multiplying every a_i by the same positive
constant leaves the kernel unchanged.

In the multilevel variant each discipline is its own level: a kernel over
the cities visited by that discipline's people, weighted in the composite
by the discipline's share of people. Levels never interact; a walker keeps
its discipline for life.
"""

import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

KERNEL_MAGIC = b"RADKRN\x00\x01"

ROW_SUM_TOL = 1e-9

ATTRACTIVENESS_MODES = ("Uniform", "Population", "Notables", "PopTimesNotables")


def pop_notable_product(population, notables):
    """Default mixed-attractiveness combiner: population * (notables + 1).

    The +1 keeps cities with zero recorded notables reachable instead of
    collapsing their weight to zero.
    """
    return np.asarray(population, dtype=float) * (np.asarray(notables, dtype=float) + 1.0)


@dataclass
class Attractiveness:
    """Per-city opportunity masses a_i for one kernel level."""
    mode: str
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.mode not in ATTRACTIVENESS_MODES:
            raise ValueError(f"unknown attractiveness mode: {self.mode!r}")
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("attractiveness must be a nonempty 1-D array")
        if np.any(self.values <= 0):
            raise ValueError("attractiveness values must be strictly positive")
        if self.mode == "Uniform" and not np.all(self.values == self.values[0]):
            raise ValueError("Uniform mode requires equal values")

    @classmethod
    def uniform(cls, n):
        return cls("Uniform", np.ones(n))

    @classmethod
    def from_population(cls, populations):
        return cls("Population", populations)

    @classmethod
    def from_notables(cls, notable_counts):
        return cls("Notables", notable_counts)

    @classmethod
    def combined(cls, populations, notable_counts, combiner=pop_notable_product):
        return cls("PopTimesNotables", combiner(populations, notable_counts))


def intervening_mass_matrix(attractiveness, distances):
    """All-pairs intervening mass s_ij via distance-ranked prefix sums.

    For each row the cities are ranked by ascending distance; a prefix sum
    of attractiveness along that ranking gives the mass strictly inside the
    open ball of radius r_ij in O(N log N) per row. The origin's own mass
    is then removed (it always sits inside the ball when r_ij > 0); the
    destination never enters, r_ij < r_ij being false.
    """
    a = np.asarray(attractiveness.values if isinstance(attractiveness, Attractiveness)
                   else attractiveness, dtype=float)
    d = np.asarray(distances.mat if hasattr(distances, "mat") else distances, dtype=float)
    n = d.shape[0]
    if d.shape != (n, n) or a.shape != (n,):
        raise ValueError("distance matrix and attractiveness sizes disagree")
    s = np.empty((n, n))
    for i in range(n):
        order = np.argsort(d[i], kind="stable")
        sorted_d = d[i][order]
        prefix = np.concatenate([[0.0], np.cumsum(a[order])])
        inside = np.searchsorted(sorted_d, d[i], side="left")
        s[i] = prefix[inside] - np.where(d[i] > 0.0, a[i], 0.0)
    np.fill_diagonal(s, 0.0)
    return s


def intervening_mass(i, j, attractiveness, distances):
    """Scalar s_ij; single-row version of intervening_mass_matrix."""
    if i == j:
        return 0.0
    a = np.asarray(attractiveness.values if isinstance(attractiveness, Attractiveness)
                   else attractiveness, dtype=float)
    d = np.asarray(distances.mat if hasattr(distances, "mat") else distances, dtype=float)
    row = d[i]
    order = np.argsort(row, kind="stable")
    sorted_d = row[order]
    prefix = np.concatenate([[0.0], np.cumsum(a[order])])
    inside = int(np.searchsorted(sorted_d, row[j], side="left"))
    return float(prefix[inside] - (a[i] if row[j] > 0.0 else 0.0))


@dataclass
class RadiationKernel:
    """Row-stochastic transition matrix over an ordered city list."""
    ids: list
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        n = len(self.ids)
        if self.matrix.shape != (n, n):
            raise ValueError("kernel shape does not match city list")
        if np.any(self.matrix < 0):
            raise ValueError("kernel has negative entries")
        rows = self.matrix.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > ROW_SUM_TOL):
            worst = float(np.abs(rows - 1.0).max())
            raise ValueError(f"kernel rows not stochastic (max |sum-1| = {worst:.3e})")

    @property
    def n(self):
        return len(self.ids)


def radiation_weights(attractiveness, distances):
    """Unnormalized radiation weights w_ij (self-transitions included)."""
    a = np.asarray(attractiveness.values if isinstance(attractiveness, Attractiveness)
                   else attractiveness, dtype=float)
    s = intervening_mass_matrix(a, distances)
    return a[None, :] / ((a[:, None] + s) * (a[:, None] + a[None, :] + s))


def single_level_kernel(attractiveness, distances, ids=None):
    """Row-normalized radiation kernel for one level.

    `distances` is a geo.DistanceMatrix or a plain square km matrix;
    `ids` overrides the node list when a plain matrix is given.
    """
    if ids is None:
        ids = list(distances.ids) if hasattr(distances, "ids") else \
            [str(k) for k in range(np.asarray(distances).shape[0])]
    w = radiation_weights(attractiveness, distances)
    row_sums = w.sum(axis=1, keepdims=True)
    if np.any(row_sums <= 0):
        raise ValueError("a kernel row has no positive weight")
    return RadiationKernel(ids=list(ids), matrix=w / row_sums)


def uniform_kernel(distances, ids=None):
    """The random-walker baseline: uniform attractiveness.

    Not the flat 1/N matrix; the intervening mass still injects the
    distance structure.
    """
    n = np.asarray(distances.mat if hasattr(distances, "mat") else distances).shape[0]
    return single_level_kernel(Attractiveness.uniform(n), distances, ids=ids)


@dataclass
class Level:
    """One discipline's mobility system.

    node subset = the cities visited by at least one person of the
    discipline; ns_share = the discipline's share of all people (the
    mixture weight); populations feed the start-city sampling.
    """
    label: str
    city_ids: list
    ns_share: float
    attractiveness: Attractiveness
    populations: np.ndarray
    kernel: Optional[RadiationKernel] = None

    def __post_init__(self):
        self.populations = np.asarray(self.populations, dtype=float)
        if not self.city_ids:
            raise ValueError(f"level {self.label!r} has an empty node subset")
        if not 0.0 < self.ns_share <= 1.0:
            raise ValueError(f"level {self.label!r} share out of (0,1]: {self.ns_share}")
        if self.populations.shape != (len(self.city_ids),):
            raise ValueError(f"level {self.label!r}: populations do not match node subset")

    def build_kernel(self, distances):
        """Compute this level's kernel on its restriction of `distances`."""
        idx = [distances.ids.index(c) for c in self.city_ids]
        sub = distances.restrict(idx)
        self.kernel = single_level_kernel(self.attractiveness, sub)
        return self.kernel


@dataclass
class MultilevelKernel:
    """Independent per-level kernels mixed by notable shares."""
    levels: list

    def __post_init__(self):
        if not self.levels:
            raise ValueError("no levels")
        total = sum(l.ns_share for l in self.levels)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"level shares must sum to 1, got {total}")
        for l in self.levels:
            if l.kernel is None:
                raise ValueError(f"level {l.label!r} has no kernel built")

    @property
    def union_ids(self):
        """Union of level node sets, in first-appearance order across levels
        (so levels sharing one id list keep it unchanged)."""
        seen, out = set(), []
        for l in self.levels:
            for c in l.city_ids:
                if c not in seen:
                    seen.add(c)
                    out.append(c)
        return out

    def composite(self):
        """NS-weighted mixture of the per-level kernels on the union node set.

        Levels do not interact; their contributions sum. A level's kernel is
        embedded with zeros outside its own node subset, so rows for cities
        absent from some level sum to that city's covered share (1 when
        every level contains it).
        """
        ids = self.union_ids
        pos = {c: k for k, c in enumerate(ids)}
        out = np.zeros((len(ids), len(ids)))
        for l in self.levels:
            take = np.array([pos[c] for c in l.city_ids], dtype=int)
            out[np.ix_(take, take)] += l.ns_share * l.kernel.matrix
        return ids, out


def multilevel_kernel(levels, distances=None):
    """Assemble a MultilevelKernel, building per-level kernels as needed."""
    for l in levels:
        if l.kernel is None:
            if distances is None:
                raise ValueError("distances required to build level kernels")
            l.build_kernel(distances)
    return MultilevelKernel(levels=list(levels))


def single_level_model(label, kernel, populations, attractiveness=None):
    """Wrap one kernel as a degenerate one-level mixture (NS = 1)."""
    if attractiveness is None:
        attractiveness = Attractiveness.uniform(kernel.n)
    level = Level(label=label, city_ids=list(kernel.ids), ns_share=1.0,
                  attractiveness=attractiveness,
                  populations=populations, kernel=kernel)
    return MultilevelKernel(levels=[level])


def dump_kernel(kernel, path):
    """Binary kernel dump: magic + uint64 n + length-prefixed UTF-8 ids +
    row-major little-endian float64 matrix."""
    mat = np.ascontiguousarray(kernel.matrix, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(KERNEL_MAGIC)
        fh.write(struct.pack("<Q", kernel.n))
        for cid in kernel.ids:
            raw = str(cid).encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
        fh.write(mat.tobytes(order="C"))


def load_kernel(path):
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != KERNEL_MAGIC:
            raise ValueError(f"bad magic in {path!r}: {magic!r}")
        (n,) = struct.unpack("<Q", fh.read(8))
        ids = []
        for _ in range(n):
            (ln,) = struct.unpack("<I", fh.read(4))
            ids.append(fh.read(ln).decode("utf-8"))
        data = np.frombuffer(fh.read(8 * n * n), dtype="<f8")
    if data.size != n * n:
        raise ValueError(f"truncated kernel dump: {path!r}")
    return RadiationKernel(ids=ids, matrix=data.reshape(n, n).copy())
