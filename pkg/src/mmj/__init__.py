"""Min-max-jump distance: exact engines, an estimator, clustering and
evaluation under the distance, label prediction, and a widest-path solver."""

from mmj.base_metrics import (
    BaseDistanceMatrix,
    BaseMetric,
    CHEBYSHEV,
    EUCLIDEAN,
    MANHATTAN,
    PRECOMPUTED,
    PointSet,
    base_distance,
    pairwise_base_matrix,
    point_to_set_distances,
)
from mmj.classifier import (
    BORDER_SENTINEL,
    DecisionGrid,
    PredictedLabel,
    TrainedClusters,
    decision_grid,
    fit_classifier,
    load_model,
    predict,
    predict_global,
    predict_scores,
    save_model,
)
from mmj.clustering import (
    BORDER_NONE,
    BORDER_STRONG,
    BORDER_WEAK,
    ClusterAssignment,
    KmeansConfig,
    classify_border_points,
    mmj_kmeans,
    one_scom,
)
from mmj.evaluation import (
    IndexScore,
    SweepResult,
    adjusted_rand_index,
    calinski_harabasz,
    davies_bouldin,
    silhouette,
    sweep_k,
)
from mmj.exact import (
    DEFAULT_BRUTE_FORCE_CAP,
    MmjMatrix,
    MmjRow,
    extend_row,
    mmj_brute_force,
    mmj_by_recursion,
    mmj_by_recursion_directed,
    path_max_jump,
    query_external_point,
    update_pairs,
)
from mmj.mst import SpanningTree, build_mst, mmj_by_mst, mmj_pair_via_mst
from mmj.sampling import (
    SamplerConfig,
    estimate_mmj_pair,
    mmj_by_estimation_and_copy,
    sample_pair_jump_maxima,
    sample_path_max_jump,
)
from mmj.widest import (
    CapacityGraph,
    CapacityMatrix,
    widest_path_by_max_spanning_tree,
    widest_path_matrix,
)

__version__ = "0.1.0"
