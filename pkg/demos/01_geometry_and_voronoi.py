"""Spherical geometry basics: great-circle distances, nearest-city
(Voronoi) assignment, and the radius of gyration of a trajectory.

Run from the repository root:  python demos/01_geometry_and_voronoi.py
"""

import numpy as np

from radiant import geo

# --- great-circle distances -------------------------------------------------

waukesha = (43.0117, -88.2317)
chicago = (41.8369, -87.6847)
white_plains = (41.0400, -73.7786)

print("great-circle distances (haversine, R = %.4f km)" % geo.EARTH_RADIUS_KM)
print("  Waukesha -> Chicago      %8.1f km" % geo.great_circle_km(waukesha, chicago))
print("  Chicago  -> White Plains %8.1f km" % geo.great_circle_km(chicago, white_plains))
print("  antipodes (0,0)-(0,180)  %8.1f km  (half circumference)"
      % geo.great_circle_km((0, 0), (0, 180)))

# --- nearest-city assignment = spherical Voronoi cells -----------------------

cities = ["paris", "berlin", "vienna", "madrid", "london"]
lats = [48.86, 52.52, 48.21, 40.42, 51.51]
lons = [2.35, 13.40, 16.37, -3.70, -0.13]
assigner = geo.CityAssigner(cities, lats, lons)

probes = {
    "Versailles (48.8, 2.1)": (48.8, 2.1),
    "Leipzig    (51.3, 12.4)": (51.3, 12.4),
    "Salzburg   (47.8, 13.0)": (47.8, 13.0),
    "Toledo     (39.9, -4.0)": (39.9, -4.0),
}
print("\nnearest-city assignment:")
for label, p in probes.items():
    cid, dist = assigner.assign(*p)
    print(f"  {label} -> {cid:7s} ({dist:6.1f} km away)")

# --- radius of gyration -------------------------------------------------------

# a stay-at-home trajectory vs a transatlantic one
home_seq = [(48.86, 2.35)] * 5 + [(48.8, 2.1)]
roam_seq = [(48.86, 2.35), (52.52, 13.40), (40.71, -74.0), (34.05, -118.24)]
print("\nradius of gyration:")
print("  around Paris            %8.1f km" % geo.radius_of_gyration(home_seq))
print("  Paris-Berlin-NY-LA      %8.1f km" % geo.radius_of_gyration(roam_seq))

# --- the all-pairs matrix, with its binary dump -------------------------------

dm = geo.DistanceMatrix.build(cities, lats, lons)
print("\ndistance matrix (km):")
with np.printoptions(precision=0, suppress=True):
    print(dm.mat)

geo.dump_matrix(dm.mat, "/tmp/demo_distances.bin")
back = geo.load_matrix("/tmp/demo_distances.bin")
print("dump/load round-trip identical:", np.array_equal(dm.mat, back))
