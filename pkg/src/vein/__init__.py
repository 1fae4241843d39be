"""Bounds on the vertex index of centrally symmetric convex bodies."""
__version__ = "0.1.0"

from .body import (
    BodySpec,
    ContainmentReport,
    EllipsoidShape,
    Polytope,
    contains,
    gauge,
    gauge_many,
    hexagon,
    polar_polytope,
    regular_polygon,
    support,
    vein_objective,
)
from .lower import BoundCertificate, euclidean_ball_certificate, g_case_c, h_min, lemma_func_checks
from .mvee import mvee_of_body, mvee_of_points, ovr
from .search import SearchConfig, SearchResult, known_witness, local_search, vein_upper
from .transfer import (
    DistanceWitness,
    dist_to_ball_upper,
    hadamard_witness,
    planar_vein_bound,
    transfer_bound,
)
