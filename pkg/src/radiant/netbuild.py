"""Migration-network construction and its descriptive statistics:
weighted directed city networks, PageRank centrality, exploration
(Heaps-law) exponents, and geometric trip-count fits.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class ConvergenceError(Exception):
    """Power iteration failed to converge; carries the final residual."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class DegenerateHeapsError(Exception):
    """Exploration curve is flat (all events in one city); exponent undefined."""


@dataclass(frozen=True)
class CityStep:
    """One city-assigned footstep: arrival date, assigned city, event kind.

    sort_key carries the full-date ordering tuple when finer than year
    resolution is available (date ties keep input order downstream).
    """
    year: int
    city_id: str
    kind: str = "InLife"
    sort_key: Optional[tuple] = None


def event_stream(city_trajectories, kind):
    """Date-ordered (person_id, city_id) events of one footstep kind."""
    events = []
    for traj in city_trajectories:
        for step in traj.steps:
            if step.kind == kind:
                key = step.sort_key if step.sort_key is not None else (step.year,)
                events.append((key, traj.person_id, step.city_id))
    events.sort(key=lambda e: e[0])   # stable: ties keep input order
    return [(pid, cid) for _k, pid, cid in events]


@dataclass
class CityTrajectory:
    """A person's date-ordered, city-assigned footsteps."""
    person_id: str
    discipline: str
    steps: list
    origin_city: Optional[str] = None


@dataclass
class MigrationNetwork:
    """Weighted directed multigraph of city-to-city jumps.

    Edge weights count consecutive footstep pairs whose destination date
    falls inside the window; self-edges (consecutive footsteps assigned to
    the same city) are kept. `discipline` records the filter used at build
    time, None for the aggregate network.
    """
    window: tuple
    edges: dict = field(default_factory=dict)   # (src, dst) -> int weight
    discipline: Optional[str] = None

    @property
    def nodes(self):
        out = set()
        for s, d in self.edges:
            out.add(s)
            out.add(d)
        return out

    @property
    def total_weight(self):
        return sum(self.edges.values())

    def add_jump(self, src, dst, w=1):
        self.edges[(src, dst)] = self.edges.get((src, dst), 0) + w

    def merged_with(self, other):
        """Edge-weight sum of two networks over the same window."""
        if other.window != self.window:
            raise ValueError("cannot merge networks over different windows")
        out = MigrationNetwork(window=self.window, edges=dict(self.edges),
                               discipline=self.discipline if self.discipline == other.discipline else None)
        for k, w in other.edges.items():
            out.edges[k] = out.edges.get(k, 0) + w
        return out

    def edge_rows(self):
        """Deterministic (src, dst, weight) rows for CSV export."""
        for (s, d) in sorted(self.edges):
            yield s, d, self.edges[(s, d)]


def build_network(city_trajectories, window, discipline=None):
    """Build the jump network from city-assigned trajectories.

    One directed edge increment per consecutive footstep pair, origin city to
    destination city, counted when the destination date lies inside the
    window (a migration happens on arrival). Additive over disjoint
    trajectory sets.
    """
    y0, y1 = int(window[0]), int(window[1])
    net = MigrationNetwork(window=(y0, y1), discipline=discipline)
    for traj in city_trajectories:
        if discipline is not None and traj.discipline != discipline:
            continue
        steps = traj.steps
        for a, b in zip(steps, steps[1:]):
            if y0 <= b.year <= y1:
                net.add_jump(a.city_id, b.city_id)
    return net


def pagerank(net, damping=0.85, tol=1e-10, max_iter=10000):
    """PageRank of the weighted jump network.

    Power iteration on the column-stochastic weighted transition matrix;
    dangling nodes redistribute uniformly. Converged when the L1 change of
    the score vector drops below tol; scores then sum to 1 within tol.
    """
    if not net.edges:
        raise ValueError("pagerank of an empty network")
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must be in (0,1): {damping}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    nodes = sorted(net.nodes)
    idx = {c: k for k, c in enumerate(nodes)}
    n = len(nodes)
    out_weight = np.zeros(n)
    for (s, _d), w in net.edges.items():
        out_weight[idx[s]] += w

    # column-stochastic transition matrix: column i holds P(i -> j)
    trans = np.zeros((n, n))
    for (s, d), w in net.edges.items():
        si, di = idx[s], idx[d]
        trans[di, si] = trans[di, si] + w / out_weight[si]
    dangling = out_weight == 0

    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        dangle_mass = x[dangling].sum()
        x_new = damping * (trans @ x + dangle_mass / n) + (1.0 - damping) / n
        err = np.abs(x_new - x).sum()
        x = x_new
        if err < tol:
            return {c: float(x[idx[c]]) for c in nodes}
    raise ConvergenceError(
        f"pagerank did not converge in {max_iter} iterations (residual {err:.3e})", err)


def pagerank_rows(scores):
    """(city, score, rank) rows sorted by descending score, id-stable ties."""
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    for rank, (city, score) in enumerate(ranked, start=1):
        yield city, score, rank


@dataclass
class HeapsFit:
    """Zero-intercept log-log fit of distinct cities S against events N."""
    kind: str
    alpha: float
    stderr: float
    n_events: np.ndarray
    s_values: np.ndarray


def heaps_fit(events, kind="InLife", min_events=10):
    """Fit S(N) = N^alpha on a date-ordered event stream of one kind.

    events: iterable of (person_id, city_id) in date order. S counts the
    distinct cities seen so far, N the events seen so far. alpha comes from
    least squares on (log N, log S) with the intercept fixed at 0, matching
    the functional form exactly. Invariant under city relabeling.
    """
    seen = set()
    n_curve, s_curve = [], []
    count = 0
    for _pid, city in events:
        count += 1
        seen.add(city)
        n_curve.append(count)
        s_curve.append(len(seen))
    if count < min_events:
        raise ValueError(f"need at least {min_events} events, got {count}")
    if len(seen) < 2:
        raise DegenerateHeapsError("all events in a single city")

    n_arr = np.asarray(n_curve, dtype=float)
    s_arr = np.asarray(s_curve, dtype=float)
    x = np.log(n_arr)
    y = np.log(s_arr)
    sxx = float(np.dot(x, x))
    alpha = float(np.dot(x, y) / sxx)
    resid = y - alpha * x
    dof = max(len(x) - 1, 1)
    stderr = float(np.sqrt(np.dot(resid, resid) / dof / sxx))
    return HeapsFit(kind=kind, alpha=alpha, stderr=stderr,
                    n_events=n_arr, s_values=s_arr)


@dataclass(frozen=True)
class GeometricFit:
    """MLE fit of a geometric law on support {1, 2, ...}: p = 1/mean."""
    p: float
    support_min: int
    n_samples: int


def fit_geometric(trip_counts):
    """Geometric MLE for per-person trip counts (all counts >= 1)."""
    counts = np.asarray(list(trip_counts), dtype=float)
    if counts.size == 0:
        raise ValueError("no trip counts to fit")
    if np.any(counts < 1):
        raise ValueError("trip counts must be >= 1")
    return GeometricFit(p=float(1.0 / counts.mean()), support_min=1,
                        n_samples=int(counts.size))
