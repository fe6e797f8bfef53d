"""Minimum-length conformal prediction sets for ordinal classification.

Post-hoc, distribution-free prediction intervals over ordered labels:
per-instance minimum-length anchored covering (plain and length-penalized),
split-conformal threshold calibration (binary-search and order-statistic
paths), greedy-expansion and naive-CDF baselines, and a synthetic-data
experiment harness.
"""

from .backend import backend_name, compiled_available
from .baselines import (
    ApsQuantile,
    aps_as_predictor,
    naive_cdf_interval,
    naive_cdf_predictor,
    ordinal_aps_calibrate,
    ordinal_aps_expand,
    ordinal_aps_predict,
    ordinal_aps_score,
)
from .calibrate import (
    METHOD_MIN_CPS,
    METHOD_MIN_RCPS,
    METHOD_NAIVE_CDF,
    METHOD_ORDINAL_APS,
    METHODS,
    CalibratedPredictor,
    SearchOptions,
    calibrate_binary_search,
    calibrate_exact,
    coverage_count,
    empirical_coverage,
    predict,
    predict_batch,
)
from .core import (
    Dataset,
    PredictionInterval,
    PrefixSums,
    ProbVector,
    argmax_mode,
    check_radial_monotonicity,
    interval_mass,
    monotone_fraction,
    prefix_sums,
)
from .covering import (
    CoveringResult,
    brute_force_min_interval,
    critical_score,
    greedy_max_mass_interval,
    min_length_interval,
    min_length_interval_regularized,
)
from .errors import (
    CalibrationError,
    ConservativeCalibrationWarning,
    DatasetFormatError,
    NotRadiallyMonotoneError,
    OrdinalCpsError,
    PredictorFormatError,
    ValidationError,
)
from .harness import (
    DEFAULT_LAMBDA_GRID,
    MethodAggregate,
    SynthSpec,
    TrialRecord,
    TrialReport,
    apply_predictor,
    avg_set_size,
    calibrate_method,
    coverage_metric,
    lambda_sweep,
    run_trials,
    split_dataset,
    synth_generate,
    tau_curve,
)
from .io import (
    DatasetFileSpec,
    load_dataset_csv,
    load_predictor,
    save_dataset_csv,
    save_predictor,
    write_report,
)

__version__ = "0.1.0"
