"""debris-spectra: a simulated Sentinel-2/MSI marine-debris campaign generator
and unsupervised spectral-analysis pipeline.

The pipeline runs simulate -> indices -> clean -> explore -> select-features
-> cluster -> report, over a pixel-table CSV that carries ten band
reflectances, nine radiometric indices and ground-truth labels per sample.
"""

from .bands import (
    BAND_NAMES,
    BANDS,
    CAMPAIGN_POLYMERS,
    CLASS_LABELS,
    FEATURE_NAMES,
    INDEX_NAMES,
    MsiBand,
)
from .forest import (
    DecisionTree,
    FeatureSet,
    ImportanceReport,
    build_feature_sets,
    fit_forest,
    fit_tree,
    fixed_feature_sets,
)
from .indices import FDI_BETA, FdiConstants, add_indices, compute_all
from .kmeans import (
    ClusterReport,
    KMeansModel,
    TrendFlags,
    compose_report,
    kmeans_fit,
    kmeans_predict,
    trend_checks,
)
from .prep import CleanReport, clean, ingest_pixel_table, merge
from .rasters import Raster, read_raster, round_to_4dp, upsample_2x, write_raster
from .records import (
    Dataset,
    PixelRecord,
    feature_vector,
    read_pixel_table,
    write_pixel_table,
)
from .scenes import (
    LabeledRasterStack,
    SceneSpec,
    build_scene,
    campaign_dataset,
    default_campaign,
)
from .spectra import (
    SignatureLibrary,
    SpectralSignature,
    band_reflectance,
    builtin_default_library,
    load_library,
)
from .stats import (
    ClassSummary,
    CorrelationMatrix,
    KsResult,
    class_summary,
    ks_two_sample,
    mean_signature,
    pearson_matrix,
)

__version__ = "0.1.0"
