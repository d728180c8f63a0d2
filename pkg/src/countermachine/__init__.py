"""countermachine: what-if search over Takagi-Sugeno war/peace classifiers.

Train a fuzzy rule base on dyadic conflict data, then invert it: given a
factual antecedent and a desired outcome, simulated annealing searches the
unlocked antecedent variables for the change that reaches it.
"""

from ._backend import BACKEND, backend_name
from .annealing import AnnealConfig, AnnealTrace, minimize
from .counterfactual import (
    CounterfactualQuery,
    CounterfactualResult,
    VariableDelta,
    delta_report,
    find_counterfactual,
)
from .data import (
    FEATURE_NAMES,
    Dataset,
    DyadRecord,
    GroundTruthSpec,
    generate_synthetic,
    load_csv,
    normalize,
    save_csv,
    split_balanced,
)
from .errors import (
    CountermachineError,
    DegenerateFeature,
    DimensionMismatch,
    InsufficientClassRows,
    MalformedModel,
    NonFiniteObjective,
    ParseError,
    RangeError,
    RuleCapExceeded,
    SingularSystem,
    TrainingDiverged,
)
from .fuzzy import (
    PEACE,
    WAR,
    FeatureVector,
    LabelEncoding,
    MembershipFunction,
    Rule,
    TskModel,
    classify,
    evaluate,
    evaluate_full,
    firing_strengths,
    load_model,
    mf_value,
    save_model,
)
from .training import TrainConfig, TrainReport, fit, init_grid

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig",
    "AnnealTrace",
    "BACKEND",
    "CounterfactualQuery",
    "CounterfactualResult",
    "CountermachineError",
    "Dataset",
    "DegenerateFeature",
    "DimensionMismatch",
    "DyadRecord",
    "FEATURE_NAMES",
    "FeatureVector",
    "GroundTruthSpec",
    "InsufficientClassRows",
    "LabelEncoding",
    "MalformedModel",
    "MembershipFunction",
    "NonFiniteObjective",
    "PEACE",
    "ParseError",
    "RangeError",
    "Rule",
    "RuleCapExceeded",
    "SingularSystem",
    "TrainConfig",
    "TrainReport",
    "TrainingDiverged",
    "TskModel",
    "VariableDelta",
    "WAR",
    "backend_name",
    "classify",
    "delta_report",
    "evaluate",
    "evaluate_full",
    "find_counterfactual",
    "firing_strengths",
    "fit",
    "generate_synthetic",
    "init_grid",
    "load_csv",
    "load_model",
    "mf_value",
    "minimize",
    "normalize",
    "save_csv",
    "save_model",
    "split_balanced",
]
