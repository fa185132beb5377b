"""Power optimization of a bistable piezoelectric energy harvester.

The package simulates a bistable piezo-magneto-elastic oscillator, classifies
its steady-state regime with the 0-1 test for chaos, and maximizes the mean
electrical output power subject to a non-chaos constraint, either by a
cross-entropy search or by exhaustive grid screening.
"""

from piezoharvest.dynamics import (
    HarvesterParams,
    InitialState,
    NonFiniteState,
    SimConfig,
    TimeSeries,
    WindowOutOfRange,
    add_noise,
    integrate_rk4,
    mean_power,
    rhs,
)
from piezoharvest.chaos01 import (
    InsufficientLength,
    SeriesTooShort,
    Test01Config,
    Test01Result,
    classify,
    correlation_k,
    msd,
    translation_vars,
)
from piezoharvest.objective import (
    BLOWUP_POWER,
    DesignSpace,
    Evaluation,
    HarvesterObjective,
    PenaltyConfig,
    evaluate,
    evaluate_raw,
    penalize,
)
from piezoharvest.cross_entropy import (
    CEConfig,
    default_elite,
    LevelRecord,
    OptimizationResult,
    mle_update,
    optimize,
    sample_truncated_gaussian,
    select_elite,
    smooth_update,
    write_trace_csv,
)
from piezoharvest.grid_search import (
    GridSpec,
    NoFeasiblePoint,
    exhaustive_search,
    write_field_csv,
)
from piezoharvest.parallel import evaluate_many

__version__ = "0.1.0"

__all__ = [
    "HarvesterParams",
    "InitialState",
    "SimConfig",
    "TimeSeries",
    "NonFiniteState",
    "WindowOutOfRange",
    "rhs",
    "integrate_rk4",
    "mean_power",
    "add_noise",
    "Test01Config",
    "Test01Result",
    "SeriesTooShort",
    "InsufficientLength",
    "translation_vars",
    "msd",
    "correlation_k",
    "classify",
    "BLOWUP_POWER",
    "DesignSpace",
    "PenaltyConfig",
    "Evaluation",
    "HarvesterObjective",
    "evaluate_raw",
    "penalize",
    "evaluate",
    "CEConfig",
    "default_elite",
    "LevelRecord",
    "OptimizationResult",
    "sample_truncated_gaussian",
    "select_elite",
    "mle_update",
    "smooth_update",
    "optimize",
    "write_trace_csv",
    "GridSpec",
    "NoFeasiblePoint",
    "exhaustive_search",
    "write_field_csv",
    "evaluate_many",
]
