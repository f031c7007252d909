"""Cone-volume vectors of polytopes, concentration polytopes, type-cone
polynomial systems, and the numerical inverse problem."""

from .geometry import (
    ConeVolumeVector,
    HPolytope,
    NormalMatrix,
    build_polytope,
    canonicalize,
    centroid,
    cone_volume_vector,
    continuity_probe,
    facet_volume,
    normalize_to_unit_volume,
    positively_spans,
    sparse_vertex_witness,
    translate_cone_volumes,
)
from .inverse import (
    InverseProblem,
    SolutionFamily,
    dimension_probe,
    feasibility_scan,
    scaling_family,
    solve,
)
from .matroid import (
    MatroidData,
    SccPolytope,
    SccVerdict,
    brute_force_scc,
    build_pscc,
    compute_matroid,
    enumerate_bases,
    enumerate_flats,
    enumerate_hrep_vertices,
    enumerate_separators,
    hrep_satisfied,
    irreducible_partition,
    pscc_direct_sum_check,
    scc_check,
)
from .planar import (
    EdgeLengthForms,
    PlanarFan,
    TypeCone,
    area_polynomial,
    detect_trapezoid_labeling,
    edge_length_forms,
    order_ccw,
    planar_type_cone,
    stancu_lengths,
    trapezoid_membership,
)
from .polynomials import Polynomial, fit_polynomial, monomial_basis
from .typecones import (
    SemialgSystem,
    TypeInfo,
    build_system,
    detect_type,
    filter_full_facet_types,
    local_type_cone,
    sample_type_cones,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
