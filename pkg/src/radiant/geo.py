"""Spherical geometry: great-circle distances, nearest-city assignment,
spherical centroids and radii of gyration.

All distances are in kilometers on a sphere of radius EARTH_RADIUS_KM.
Latitudes/longitudes are in degrees; longitudes are normalized to (-180, 180].
"""

import struct
import warnings

import numpy as np

EARTH_RADIUS_KM = 6371.0088

# Binary container for distance-matrix dumps (see dump_matrix/load_matrix).
MATRIX_MAGIC = b"GEODM\x00\x00\x01"

# Nearest-city assignments farther than this are flagged in diagnostics:
# the merging step can legitimately collapse a point to a very distant city
# when no populated city is nearby, but such cases are worth surfacing.
FAR_ASSIGNMENT_KM = 500.0


def normalize_lon(lon):
    """Wrap longitude(s) into (-180, 180]; in-range values pass bit-exact."""
    lon = np.asarray(lon, dtype=float)
    wrapped = 180.0 - ((180.0 - lon) % 360.0)
    out = np.where((lon > -180.0) & (lon <= 180.0), lon, wrapped)
    return float(out) if out.ndim == 0 else out


def validate_point(lat, lon):
    """Check latitude/longitude bounds; returns (lat, normalized lon)."""
    if not (-90.0 <= lat <= 90.0):
        raise ValueError(f"latitude out of range: {lat}")
    if not (-180.0 <= lon <= 180.0):
        raise ValueError(f"longitude out of range: {lon}")
    return float(lat), float(normalize_lon(lon))


def great_circle_km(a, b):
    """Great-circle distance between two (lat, lon) points in kilometers.

    Haversine formulation; symmetric, nonnegative, at most pi * EARTH_RADIUS_KM.
    Accepts scalars or broadcastable arrays of coordinates.
    """
    lat1, lon1 = np.radians(a[0]), np.radians(a[1])
    lat2, lon2 = np.radians(b[0]), np.radians(b[1])
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = np.sin(dlat / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    d = 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))
    return float(d) if np.ndim(d) == 0 else d


def pairwise_distances(lats, lons):
    """Dense symmetric matrix of great-circle distances in km.

    The broadcast haversine is exactly symmetric in IEEE arithmetic
    (sin(-x)^2 == sin(x)^2 and the cos product commutes), with an exact
    zero diagonal.
    """
    lat = np.radians(np.asarray(lats, dtype=float))
    lon = np.radians(np.asarray(lons, dtype=float))
    dlat = lat[:, None] - lat[None, :]
    dlon = lon[:, None] - lon[None, :]
    h = np.sin(dlat / 2.0) ** 2 + np.cos(lat)[:, None] * np.cos(lat)[None, :] * np.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def to_cartesian(lats, lons):
    """Unit-sphere Cartesian coordinates, shape (n, 3)."""
    lat = np.radians(np.asarray(lats, dtype=float))
    lon = np.radians(np.asarray(lons, dtype=float))
    return np.column_stack([
        np.cos(lat) * np.cos(lon),
        np.cos(lat) * np.sin(lon),
        np.sin(lat),
    ])


def spherical_centroid(points):
    """Spherical centroid of (lat, lon) points: normalized 3-D Cartesian mean.

    Antipodally balanced inputs leave the Cartesian mean near the origin and
    the centroid undefined; we fall back to the first point and warn.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("need a nonempty (n, 2) array of lat/lon points")
    mean = to_cartesian(pts[:, 0], pts[:, 1]).mean(axis=0)
    norm = np.linalg.norm(mean)
    if norm < 1e-9:
        warnings.warn("degenerate spherical centroid (antipodally balanced points); "
                      "falling back to the first point", RuntimeWarning)
        return float(pts[0, 0]), float(pts[0, 1])
    mean = mean / norm
    lat = np.degrees(np.arcsin(np.clip(mean[2], -1.0, 1.0)))
    lon = np.degrees(np.arctan2(mean[1], mean[0]))
    return float(lat), float(lon)


def radius_of_gyration(points):
    """Root-mean-square great-circle distance to the spherical centroid, km.

    Invariant under permutation of the input points; 0 when all points
    coincide.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, 2)
    if pts.shape[0] == 0:
        raise ValueError("radius of gyration needs at least one point")
    if np.all(pts == pts[0]):
        return 0.0
    c = spherical_centroid(pts)
    d = great_circle_km((pts[:, 0], pts[:, 1]), (np.full(pts.shape[0], c[0]), np.full(pts.shape[0], c[1])))
    return float(np.sqrt(np.mean(np.asarray(d) ** 2)))


class DistanceMatrix:
    """All-pairs great-circle distances over an ordered list of city ids,
    with per-row neighbor orderings for the prefix-sum kernels.

    Attributes
    ----------
    ids : list of city ids, in table order
    mat : (n, n) float64 km, symmetric, zero diagonal
    order : (n, n) int argsort of each row by ascending distance (stable)
    """

    def __init__(self, ids, mat):
        mat = np.asarray(mat, dtype=float)
        if mat.shape != (len(ids), len(ids)):
            raise ValueError("distance matrix shape does not match id list")
        self.ids = list(ids)
        self.mat = mat
        self.order = np.argsort(mat, axis=1, kind="stable")

    @classmethod
    def build(cls, ids, lats, lons):
        return cls(ids, pairwise_distances(lats, lons))

    @property
    def n(self):
        return len(self.ids)

    def restrict(self, indices):
        """Sub-matrix over a subset of city positions (new object, re-sorted)."""
        idx = np.asarray(indices, dtype=int)
        return DistanceMatrix([self.ids[i] for i in idx], self.mat[np.ix_(idx, idx)])

    def index_of(self, city_id):
        return self.ids.index(city_id)


def dump_matrix(mat, path):
    """Write a square float64 matrix as magic + uint64 n + row-major LE data."""
    mat = np.ascontiguousarray(mat, dtype="<f8")
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError("only square matrices are dumped")
    with open(path, "wb") as fh:
        fh.write(MATRIX_MAGIC)
        fh.write(struct.pack("<Q", n))
        fh.write(mat.tobytes(order="C"))


def load_matrix(path):
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MATRIX_MAGIC:
            raise ValueError(f"bad magic in {path!r}: {magic!r}")
        (n,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(8 * n * n), dtype="<f8")
    if data.size != n * n:
        raise ValueError(f"truncated matrix dump: {path!r}")
    return data.reshape(n, n).copy()


class CityAssigner:
    """Nearest-city (spherical Voronoi) assignment against a fixed city table.

    Nearest-neighbor under great-circle distance is exactly the spherical
    Voronoi cell assignment. Exact distance ties resolve to the smallest
    city_id, which makes the result invariant under reordering of the table.
    """

    def __init__(self, ids, lats, lons):
        self.ids = list(ids)
        self.lats = np.asarray(lats, dtype=float)
        self.lons = np.asarray(lons, dtype=float)
        self._xyz = to_cartesian(self.lats, self.lons)

    def assign(self, lat, lon):
        """Return (city_id, distance_km) of the nearest city."""
        # squared chord distance is monotone in great-circle distance,
        # so the argmin is identical and ties coincide
        p = to_cartesian([lat], [lon])[0]
        d2 = np.sum((self._xyz - p) ** 2, axis=1)
        m = d2.min()
        tied = np.flatnonzero(d2 == m)
        if tied.size > 1:
            best = min(tied, key=lambda i: self.ids[i])
        else:
            best = int(tied[0])
        return self.ids[best], great_circle_km((lat, lon), (self.lats[best], self.lons[best]))


def assign_to_city(point, cities):
    """Nearest city id for one (lat, lon) point.

    `cities` is a CityAssigner or anything exposing ids/lats/lons
    (e.g. an ingest.CityTable).
    """
    if not isinstance(cities, CityAssigner):
        cities = CityAssigner(cities.ids, cities.lats, cities.lons)
    return cities.assign(point[0], point[1])[0]
