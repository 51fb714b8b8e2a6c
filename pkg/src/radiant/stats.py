"""Mobility distributions and model-vs-data comparison metrics.

Three statistics summarize a set of trajectories: the radius of gyration
per person, the number of distinct cities visited per person, and the
length of every migration jump (consecutive pair of distinct cities).
Binned distributions of each are compared with adjusted R-squared, Pearson
correlation, Kullback-Leibler divergence (nats), and the first Wasserstein
distance; ensemble runs report each metric as mean +/- standard error over
replicates.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from . import geo

# Default binning: 100 uniform bins over [0, 20100] km cover every possible
# great-circle value (half circumference is ~20015 km); destination counts
# use unit-width integer bins. Comparison metrics depend on this choice, so
# both sides of a comparison must share it.
DEFAULT_KM_MAX = 20100.0
DEFAULT_KM_BINS = 100


class MismatchedBinsError(Exception):
    """Two distributions do not share identical bin edges."""


class DegenerateDistributionError(Exception):
    """A metric is undefined on the given densities (zero variance)."""


@dataclass
class BinnedDistribution:
    """Normalized histogram: sum(density * width) == 1."""
    edges: np.ndarray
    density: np.ndarray
    n_samples: int

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        self.density = np.asarray(self.density, dtype=float)
        if self.edges.ndim != 1 or self.edges.size < 2:
            raise ValueError("need at least two bin edges")
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if self.density.shape != (self.edges.size - 1,):
            raise ValueError("density length must be number of bins")
        if np.any(self.density < 0):
            raise ValueError("densities must be nonnegative")
        total = float(np.sum(self.density * self.widths))
        if self.n_samples > 0 and abs(total - 1.0) > 1e-9:
            raise ValueError(f"density does not integrate to 1 (got {total})")

    @property
    def widths(self):
        return np.diff(self.edges)

    @property
    def masses(self):
        return self.density * self.widths

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @classmethod
    def from_samples(cls, values, edges):
        """Histogram `values` on `edges`; out-of-range values clip into the
        end bins so no mass is lost."""
        values = np.asarray(list(values), dtype=float)
        edges = np.asarray(edges, dtype=float)
        if values.size == 0:
            raise ValueError("no samples to bin")
        lo, hi = edges[0], edges[-1]
        clipped = np.clip(values, lo, hi - 1e-12 * max(abs(hi), 1.0))
        counts, _ = np.histogram(clipped, bins=edges)
        density = counts / (values.size * np.diff(edges))
        return cls(edges=edges, density=density, n_samples=int(values.size))


def km_edges(bins=DEFAULT_KM_BINS, km_max=DEFAULT_KM_MAX):
    return np.linspace(0.0, float(km_max), int(bins) + 1)


def count_edges(max_count):
    """Unit bins centered on the integers 1..max_count."""
    return np.arange(0.5, max_count + 1.5, 1.0)


def mobility_samples(sequences, coords):
    """Raw per-trajectory statistics from city-id sequences.

    coords maps city_id -> (lat, lon). Returns (radii of gyration,
    distinct-destination counts, jump lengths). Jumps between identical
    consecutive cities (stays) contribute no jump length.
    """
    radii, destinations, jumps = [], [], []
    for seq in sequences:
        if not seq:
            continue
        pts = np.array([coords[c] for c in seq], dtype=float)
        radii.append(geo.radius_of_gyration(pts))
        destinations.append(len(set(seq)))
        for a, b in zip(seq, seq[1:]):
            if a != b:
                jumps.append(geo.great_circle_km(coords[a], coords[b]))
    return np.asarray(radii), np.asarray(destinations, dtype=float), np.asarray(jumps)


def distributions(sequences, coords, km_bins=DEFAULT_KM_BINS,
                  km_max=DEFAULT_KM_MAX, dest_max=None):
    """The three binned distributions for a set of trajectories.

    Returns (radius-of-gyration, distinct-destinations, jump-length)
    BinnedDistributions. dest_max defaults to the observed maximum; pass a
    shared value when two sides must be comparable.
    """
    radii, dests, jumps = mobility_samples(sequences, coords)
    if radii.size == 0:
        raise ValueError("no nonempty trajectories")
    edges_km = km_edges(km_bins, km_max)
    if dest_max is None:
        dest_max = int(dests.max())
    rg_dist = BinnedDistribution.from_samples(radii, edges_km)
    dest_dist = BinnedDistribution.from_samples(dests, count_edges(dest_max))
    if jumps.size == 0:
        # immobile population: all jump mass at zero by convention
        jumps = np.zeros(1)
    jump_dist = BinnedDistribution.from_samples(jumps, edges_km)
    return rg_dist, dest_dist, jump_dist


def _check_same_edges(p, q):
    if p.edges.shape != q.edges.shape or not np.array_equal(p.edges, q.edges):
        raise MismatchedBinsError("distributions use different bin edges")


def kl_divergence(p, q, smoothing=None):
    """KL(P || Q) in nats over bin masses.

    Empirical histograms have empty bins where raw KL diverges, so both
    sides get additive smoothing before renormalization; the default
    epsilon is 1/(10 * n_samples) of each distribution respectively.
    Asymmetric by definition; nonnegative, 0 iff P == Q post-smoothing.
    """
    _check_same_edges(p, q)
    eps_p = smoothing if smoothing is not None else 1.0 / (10.0 * max(p.n_samples, 1))
    eps_q = smoothing if smoothing is not None else 1.0 / (10.0 * max(q.n_samples, 1))
    pm = p.masses + eps_p
    qm = q.masses + eps_q
    pm = pm / pm.sum()
    qm = qm / qm.sum()
    return float(np.sum(pm * np.log(pm / qm)))


def wasserstein1(p, q):
    """First Wasserstein distance between binned distributions, in the units
    of the support: sum |CDF_P - CDF_Q| * bin width."""
    _check_same_edges(p, q)
    cdf_p = np.cumsum(p.masses)
    cdf_q = np.cumsum(q.masses)
    return float(np.sum(np.abs(cdf_p - cdf_q) * p.widths))


def fit_metrics(model, data):
    """(adjusted R^2, Pearson rho, two-sided p-value) of model vs data
    densities on shared bins.

    R^2 = 1 - SS_res/SS_tot with the data as reference; adjusted with zero
    model parameters (the radiation model is parameter-free), so it equals
    the plain R^2 and can go negative for fits worse than the data mean.
    """
    _check_same_edges(model, data)
    y = data.density
    x = model.density
    n = y.size
    if n < 3:
        raise ValueError("need at least 3 bins")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise DegenerateDistributionError("zero-variance data densities")
    if float(np.sum((x - x.mean()) ** 2)) == 0.0:
        raise DegenerateDistributionError("zero-variance model densities")
    ss_res = float(np.sum((y - x) ** 2))
    r2 = 1.0 - ss_res / ss_tot
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - 1)   # 0 fitted parameters
    rho = float(np.corrcoef(x, y)[0, 1])
    p_value = pearson_p_value(rho, n)
    return adj_r2, rho, p_value


def pearson_p_value(rho, n):
    """Two-sided t-test on a Pearson correlation with n paired samples."""
    if n < 3:
        raise ValueError("need n >= 3")
    rho = min(max(rho, -1.0), 1.0)
    if 1.0 - rho * rho < 1e-15:
        return 0.0
    t = abs(rho) * math.sqrt((n - 2) / (1.0 - rho * rho))
    return float(2.0 * sps.t.sf(t, df=n - 2))


@dataclass
class MetricSummary:
    """Mean +/- standard error of one metric over replicates."""
    mean: float
    se: float

    @classmethod
    def from_values(cls, values):
        v = np.asarray(values, dtype=float)
        se = float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0
        return cls(mean=float(v.mean()), se=se)


@dataclass
class ComparisonReport:
    """Replicate-aggregated comparison of one model against the data for one
    statistic."""
    statistic: str
    model: str
    adj_r2: MetricSummary
    pearson: MetricSummary
    p_value: float
    kl: MetricSummary
    wasserstein: MetricSummary
    replicates: int

    def as_dict(self):
        return {
            "statistic": self.statistic,
            "model": self.model,
            "adj_r2": self.adj_r2.mean, "adj_r2_se": self.adj_r2.se,
            "pearson": self.pearson.mean, "p_value": self.p_value,
            "kl": self.kl.mean, "kl_se": self.kl.se,
            "wasserstein": self.wasserstein.mean, "wasserstein_se": self.wasserstein.se,
            "replicates": self.replicates,
        }


def compare_replicates(statistic, model_name, data_dist, replicate_dists):
    """Aggregate per-replicate metrics of model distributions against one
    fixed data distribution. KL is taken as KL(data || model)."""
    r2s, rhos, kls, w1s = [], [], [], []
    for rd in replicate_dists:
        adj_r2, rho, _p = fit_metrics(rd, data_dist)
        r2s.append(adj_r2)
        rhos.append(rho)
        kls.append(kl_divergence(data_dist, rd))
        w1s.append(wasserstein1(data_dist, rd))
    rho_summary = MetricSummary.from_values(rhos)
    return ComparisonReport(
        statistic=statistic, model=model_name,
        adj_r2=MetricSummary.from_values(r2s),
        pearson=rho_summary,
        p_value=pearson_p_value(rho_summary.mean, data_dist.density.size),
        kl=MetricSummary.from_values(kls),
        wasserstein=MetricSummary.from_values(w1s),
        replicates=len(r2s),
    )


def smoothed_peaks(dist, window=3):
    """Indices of local maxima of the density after a `window`-bin moving
    average: bins strictly exceeding both neighbors."""
    d = np.asarray(dist.density if isinstance(dist, BinnedDistribution) else dist, dtype=float)
    # edge windows truncate rather than zero-pad, so monotone inputs stay monotone
    kernel = np.ones(window)
    sm = np.convolve(d, kernel, mode="same") / np.convolve(np.ones_like(d), kernel, mode="same")
    peaks = [k for k in range(1, sm.size - 1) if sm[k] > sm[k - 1] and sm[k] > sm[k + 1]]
    return peaks
