"""Crowd-counting toolkit: ground-truth maps, learning-to-scale, localization
by distance-label minima, dense-region refinement, and evaluation metrics."""

from .closeness import ClosenessStats, closeness_level, nn_distances
from .core import (
    BBox,
    Component,
    PointSet,
    bilinear_resize,
    connected_components,
    crop,
    round_half_up,
    scale_points,
)
from .l2s import L2SConfig, L2SState, center_loss, fit, grad_r, update_center
from .losses import (
    LossConfig,
    ProbabilityVolume,
    combined_localization,
    combined_regression,
    dce_grad,
    dce_loss,
    mse_loss,
)
from .mapgen import (
    DEFAULT_EDGES,
    DensityConfig,
    DistanceLabelMap,
    HistogramResult,
    LabelConfig,
    density_map,
    distance_map,
    local_minima,
    quantize_labels,
    value_histogram,
)
from .metrics import (
    MatchConfig,
    MatchResult,
    count_errors,
    game,
    knn_sigma,
    match_points,
    prf,
)
from .pipeline import (
    AutoScaleResult,
    FilePredictor,
    OracleExact,
    OracleNoisy,
    PipelineConfig,
    Predictor,
    Region,
    analytic_scale,
    regenerate_gt,
    run_autoscale,
    select_dense_region_localization,
    select_dense_region_regression,
    stitch_count,
    stitch_points,
)
from .synth import PoissonProcess, SceneSpec, ThomasProcess, dense_sparse_composite, generate

__version__ = "0.1.0"
