"""Regional explanations of tabular regression models.

Clusters each feature's ICE curves by slope, explains every cluster with a
single-split predicate, and scores how faithfully the resulting curves let a
reader reconstruct the model's predictions. Ships with an internal boosted
tree trainer, an external-process oracle, an evaluation harness, figure
rendering, and a JSON export consumed by the interactive UI.
"""

from .clustering import (
    ClusterAssignment,
    agglomerative_cluster,
    filter_clusters,
    merge_clusters,
    slope_features,
    ward_labels,
)
from .dataset import (
    ColumnSchema,
    Dataset,
    FeatureGrid,
    FeatureKind,
    load_csv,
    quantile_grid,
    synth_interaction,
)
from .evaluation import (
    BaselineReport,
    CeilingReport,
    CorrespondenceReport,
    hstat_correspondence,
    information_ceiling,
    random_cluster_baseline,
)
from .explain import (
    Direction,
    FitMetrics,
    Predicate,
    evaluate_predicate,
    fit_stump,
    predicate_text,
)
from .export import export_document, dumps_json, schema_path, write_json
from .interaction import FeatureScores, HMatrix, dtw, feature_scores, h_matrix, h_statistic
from .model import (
    ExternalOracle,
    FunctionOracle,
    GbmModel,
    ModelOracle,
    RegressionTree,
    predict,
    r_squared,
    train_gbm,
)
from .pdcurves import CurveSet, compute_ice, mean_prediction_of, pdp_of
from .pipeline import AnalysisResult, FeatureAnalysis, FilterParams, analyze, analyze_feature

__version__ = "0.1.0"
