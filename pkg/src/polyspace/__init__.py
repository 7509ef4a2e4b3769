"""Exact Betti numbers, chamber codes and random-linkage statistics for polygon spaces."""

__version__ = "0.1.0"

from .betti import (
    BettiProfile,
    alpha,
    betti_m,
    betti_n,
    planar_profile,
    spatial_profile,
    tc_n,
    total_betti_m,
)
from .chambers import ChamberCode, chamber_code, enumerate_chamber_orbits, same_chamber_orbit
from .core import (
    Emptiness,
    LengthVector,
    SubsetClass,
    classify_subset,
    in_gamma,
    in_lambda,
    is_generic,
    is_normal,
    n_nonempty,
    normalize,
    parse_lengths,
)
from .errors import CapacityError, DomainError, EmptinessError, GenericityError, PolyspaceError
from .subsets import SubsetMask
from .volume import frustum_ratio, gamma_lower_bound, lambda_bound, r0, vj_ratio
