"""Few-shot motion-sensor user identification with signal augmentation.

Library + CLI for windowed motion-sensor gestures: five training-time
augmentation methods, a from-scratch dual-solver SVM with FAR/FRR bias
calibration, a per-user few-shot evaluation protocol with disjoint
negative pools, a synthetic dataset generator, and replication-style
report emission.
"""

from .augment import (
    INTENSITY_FACTOR_GRID,
    NOISE_SIGMA_GRID,
    TIME_FACTOR_GRID,
    AugmentationPlan,
    AugmentationSpec,
    Method,
    WarpCuts,
    add_random_noise,
    apply_plan,
    draw_warp_cuts,
    intensity_scale,
    temporal_scale,
    warp,
)
from .config import load_experiment_config
from .dataio import (
    Dataset,
    GestureSample,
    load_dataset,
    load_embeddings,
    write_dataset,
    write_embeddings,
)
from .errors import ConfigError, ConvergenceError, DataFormatError, MotionIdError
from .features import (
    Embedding,
    EmbeddingTable,
    StatisticalProvider,
    TableProvider,
    extract_statistical,
    lookup_embedding,
)
from .protocol import (
    AugmentationGrid,
    EvalReport,
    ExperimentConfig,
    FewShotSplit,
    PoolPartition,
    SplitCounts,
    build_split,
    make_provider,
    run_cell,
    run_experiment,
)
from .report import write_report
from .seeds import derive_seed
from .signals import Signal, TimeMap, apply_time_map, resample_linear
from .svm import (
    CalibrationResult,
    RatePair,
    SvmConfig,
    SvmModel,
    calibrate_bias,
    compute_rates,
    decision_scores,
    train,
)
from .synth import SynthConfig, generate

__version__ = "0.1.0"
