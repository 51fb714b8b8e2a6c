"""radiant: migration networks of notable individuals and radiation-model
simulations of their mobility.

Submodules
----------
ingest    : parsing and filtering of persons, footsteps, and city tables
geo       : great-circle geometry, Voronoi city assignment, radius of gyration
netbuild  : migration networks, PageRank, Heaps exponents, geometric fits
radiation : single-level and multilevel radiation kernels
sim       : seeded Monte-Carlo walker ensembles
stats     : mobility distributions and comparison metrics
pipeline  : end-to-end orchestration used by the CLI
"""

from . import geo, ingest, netbuild, pipeline, radiation, sim, stats  # noqa: F401
from .geo import DistanceMatrix, great_circle_km, radius_of_gyration  # noqa: F401
from .ingest import (  # noqa: F401
    CityTable, Footstep, Person, Trajectory,
    filter_active, parse_cities, parse_footsteps, parse_persons,
)
from .netbuild import (  # noqa: F401
    MigrationNetwork, build_network, fit_geometric, heaps_fit, pagerank,
)
from .radiation import (  # noqa: F401
    Attractiveness, Level, MultilevelKernel, RadiationKernel,
    intervening_mass, multilevel_kernel, single_level_kernel, uniform_kernel,
)
from .sim import SimConfig, SimTrajectory, run_ensemble  # noqa: F401
from .stats import (  # noqa: F401
    BinnedDistribution, distributions, fit_metrics, kl_divergence, wasserstein1,
)

__version__ = "0.1.0"
