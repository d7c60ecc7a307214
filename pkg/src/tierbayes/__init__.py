"""tierbayes: progressive Bayesian confidence tiers for N-of-1 daily logs.

Sequential conjugate inference over single-subject time series, with daily
classification of factor/outcome associations into graded confidence tiers
(null / clue / pattern / correlation), plausibility scoring with confounder
checks, a seeded synthetic generator with ground truth, frequentist
baselines, and an experiment harness for detection-time, calibration, and
false-discovery evaluation.
"""

from ._kernels import backend_name
from .baselines import TTestResult, fixed_threshold_detector, naive_detector, welch_t_test
from .conjugate import (
    CoefficientMarginal,
    PosteriorState,
    PriorConfig,
    absorb,
    coefficient_marginal,
    credible_interval,
    kl_stability,
    ks_calibration,
    posterior_predictive_coverage,
    posterior_update,
    prior_state,
    prob_negative,
    prob_positive,
    student_t_cdf,
)
from .dataset import (
    Dataset,
    DatasetMeta,
    Observation,
    PairKey,
    load_dataset,
    pair_samples,
    save_dataset,
)
from .harness import (
    DetectionRecord,
    ExperimentReport,
    contraction_trace,
    evaluate_single,
    monte_carlo,
    sensitivity_sweep,
)
from .scoring import (
    Insight,
    PlausibilityBreakdown,
    ValenceMap,
    build_insights,
    detect_confounders,
    plausibility,
)
from .synth import (
    DEFAULT_SEED,
    EffectSpec,
    FactorSpec,
    GeneratorConfig,
    GroundTruthSpec,
    VitalSpec,
    default_generator_config,
    default_valence_map,
    factor_process_step,
    generate,
    load_ground_truth,
    save_ground_truth,
)
from .tiers import (
    EngineConfig,
    Tier,
    TierTimeline,
    TimelineEntry,
    adaptive_threshold,
    classify_tier,
    first_attainment,
    run_engine,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "TTestResult",
    "fixed_threshold_detector",
    "naive_detector",
    "welch_t_test",
    "CoefficientMarginal",
    "PosteriorState",
    "PriorConfig",
    "absorb",
    "coefficient_marginal",
    "credible_interval",
    "kl_stability",
    "ks_calibration",
    "posterior_predictive_coverage",
    "posterior_update",
    "prior_state",
    "prob_negative",
    "prob_positive",
    "student_t_cdf",
    "Dataset",
    "DatasetMeta",
    "Observation",
    "PairKey",
    "load_dataset",
    "pair_samples",
    "save_dataset",
    "DetectionRecord",
    "ExperimentReport",
    "contraction_trace",
    "evaluate_single",
    "monte_carlo",
    "sensitivity_sweep",
    "Insight",
    "PlausibilityBreakdown",
    "ValenceMap",
    "build_insights",
    "detect_confounders",
    "plausibility",
    "DEFAULT_SEED",
    "EffectSpec",
    "FactorSpec",
    "GeneratorConfig",
    "GroundTruthSpec",
    "VitalSpec",
    "default_generator_config",
    "default_valence_map",
    "factor_process_step",
    "generate",
    "load_ground_truth",
    "save_ground_truth",
    "EngineConfig",
    "Tier",
    "TierTimeline",
    "TimelineEntry",
    "adaptive_threshold",
    "classify_tier",
    "first_attainment",
    "run_engine",
    "__version__",
]
