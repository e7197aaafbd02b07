"""Finitely generated rational semigroups seen through their holomorphic correspondences.

The public surface re-exports the main types and operations of the
submodules: ``sphere`` (points and the chordal metric), ``poly`` (root
finding), ``rational`` (maps), ``correspondence`` (chains and words),
``measures`` (pullbacks, repelling measures, shrinkage) and ``dimension``
(the Hausdorff-dimension lower bound and box counting).
"""

__version__ = "0.1.0"

from .correspondence import (
    BranchBoundReport,
    Chain,
    Word,
    branch_count_bound,
    chain_degrees,
    chain_from_config,
    chain_to_config,
    compose_chains,
    critical_union,
    enumerate_words,
    iterate_chain,
    regular_branch_count,
    word_map,
    word_multiplier,
)
from .dimension import (
    DimensionReport,
    JuliaSample,
    box_dimension,
    case_a_check,
    circle_sample,
    estimate_M,
    lambda_table,
    lower_bound,
    power_family,
    pullback_julia_sample,
    recoordinate,
    repelling_sample,
)
from .errors import (
    CapExceeded,
    CaseASuspicion,
    ConfigError,
    PoleOnSample,
    RatCorrError,
    RootFindingError,
    UnreducedMapError,
)
from .measures import (
    AtomicMeasure,
    RepellingPoint,
    ShrinkProbeParams,
    angular_histogram,
    binned_tv,
    branch_shrink_probe,
    pullback_exact,
    pullback_sample,
    repelling_measure,
    word_fixed_points,
)
from .poly import ComplexPoly, RootSet, poly_eval_derive, poly_mul, poly_roots
from .rational import (
    RationalMap,
    compose_maps,
    conjugate,
    critical_values,
    evaluate,
    fixed_points,
    preimages,
    spherical_multiplier,
)
from .sphere import (
    P1Point,
    PointSet,
    chordal_distance,
    diameter,
    project_affine,
    random_point,
)
