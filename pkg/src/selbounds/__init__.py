"""Bounds on selection bias for binary-outcome causal studies.

The package computes sensitivity-parameter (Smith-VanderWeele style)
bounds, either directly from user-supplied parameters or from a fully
specified discrete selection model; assumption-free bounds from observed
data; and a sharpness classification for the subpopulation bounds. A
simulated register dataset, a CLI and a JSON service accompany the
library.
"""

from .bounds import (
    BoundResult,
    EstimandKind,
    ObservedSummary,
    SensitivityParamsSub,
    SensitivityParamsTotal,
    af_bound,
    bias,
    bounding_factor,
    sv_bound,
)
from .dataset import (
    DataSummary,
    Dataset,
    af_bound_from_data,
    read_csv,
    simulate,
    summarize,
    write_csv,
    zika_learner,
    zika_spec,
)
from .errors import (
    ConstructionError,
    DegenerateStratumError,
    InvalidInputError,
    ParameterDomainError,
    SelBoundsError,
    SharpnessConditionError,
    UnsupportedEstimandError,
    ZeroProbabilityError,
)
from .links import LinkKind, link_eval
from .mstructure import (
    ConditionalTables,
    DiscreteDist,
    EstimandReport,
    MStructureBoundResult,
    MStructureSpec,
    causal_estimands,
    enumerate_joint,
    evaluate_tables,
    observed_summary,
    reverse_treatment,
    selection_prevalence,
    sv_bound_parameters_m,
    sv_params_sub,
    sv_params_total,
)
from .oracle import (
    JointDistSub,
    JointDistTotal,
    ObservedSub,
    ObservedTotal,
    bias_from_joint_sub,
    construct_sharp,
    construct_vi_sub,
    construct_vi_total,
    params_from_joint_sub,
    params_from_joint_total,
)
from .sharpness import (
    SharpnessGrid,
    SharpnessVerdict,
    Verdict,
    sharpness_grid,
    sv_bound_sharp,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # bounds
    "EstimandKind",
    "SensitivityParamsTotal",
    "SensitivityParamsSub",
    "ObservedSummary",
    "BoundResult",
    "bounding_factor",
    "sv_bound",
    "af_bound",
    "bias",
    # model
    "DiscreteDist",
    "MStructureSpec",
    "ConditionalTables",
    "EstimandReport",
    "MStructureBoundResult",
    "LinkKind",
    "link_eval",
    "evaluate_tables",
    "reverse_treatment",
    "enumerate_joint",
    "observed_summary",
    "selection_prevalence",
    "causal_estimands",
    "sv_params_total",
    "sv_params_sub",
    "sv_bound_parameters_m",
    # sharpness
    "Verdict",
    "SharpnessVerdict",
    "SharpnessGrid",
    "sv_bound_sharp",
    "sharpness_grid",
    # oracle
    "ObservedTotal",
    "ObservedSub",
    "JointDistTotal",
    "JointDistSub",
    "params_from_joint_total",
    "params_from_joint_sub",
    "construct_vi_total",
    "construct_vi_sub",
    "construct_sharp",
    "bias_from_joint_sub",
    # dataset
    "Dataset",
    "DataSummary",
    "zika_spec",
    "zika_learner",
    "simulate",
    "summarize",
    "af_bound_from_data",
    "read_csv",
    "write_csv",
    # errors
    "SelBoundsError",
    "InvalidInputError",
    "ParameterDomainError",
    "UnsupportedEstimandError",
    "SharpnessConditionError",
    "DegenerateStratumError",
    "ZeroProbabilityError",
    "ConstructionError",
]
