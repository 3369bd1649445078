"""Functorial hierarchical clustering on finite metric spaces."""

from .errors import FunclustError
from .metric import (
    FiniteMetricSpace,
    MorphismClass,
    SetMap,
    classify_morphism,
    components_at,
    from_points,
    path_metric,
    quotient_at_scale,
    random_metric_space,
    scale_metric,
    separation,
    two_point_space,
    validate_metric,
)
from .persistence import (
    Dendrogram,
    Partition,
    PersistentSet,
    interval_report,
    is_persistence_preserving,
    persistent_to_pseudometric,
    pullback,
    refines,
    scale_persistent,
    theta_at,
)
from .linkage import LinkageRule, agglomerate, rgen
from .ultrametric import check_ultrametric, dendrogram_ultrametric_roundtrip, epsilon_metric
from .gh import (
    Correspondence,
    check_gh_contraction,
    covering_radius,
    distortion,
    gh_exact,
    gh_lower_bound,
    hausdorff,
    set_distance,
)
from .functorial import (
    cardinality_filtered,
    check_conditions,
    counterexample_search,
    cover_cluster_graph,
    get_scheme,
)
from .convergence import (
    component_space,
    convergence_experiment,
    parse_shape,
    sample_shape,
    stability_experiment,
)
from .zigzag import (
    Barcode,
    ZigZagF2Diagram,
    ZigZagSetDiagram,
    bootstrap_zigzag,
    interval_decomposition,
    linearize,
    validate_barcode,
)

__version__ = "0.1.0"
