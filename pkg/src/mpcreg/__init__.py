"""Privacy-preserving linear regression over real-number secret shares.

n parties jointly fit a linear model with a Gaussian prior without
revealing their rows: local Gram aggregation, Shamir-style sharing over
the reals, and one of two secure solvers (masked inverse or pivoting-free
elimination), with every opening counted and an analytic upper bound on
what a semi-honest coalition can learn.
"""

from .datasets import (
    Dataset,
    bundled_housing_path,
    load_csv,
    normalize,
    split_and_partition,
    with_bias,
)
from .engine import BeaverTriple, OpeningLedger, RandomMask, Session
from .experiments import ExperimentReport, ExperimentSpec, run_grid
from .privacy import (
    CostModel,
    LeakageScenario,
    gamma,
    leakage_bound,
    openings_gauss,
    openings_inverse,
    reference_leak,
    sigma_x_estimate,
    worst_case_adversary,
)
from .regression import (
    Aggregates,
    PartyDataset,
    PriorSpec,
    RegressionConfig,
    assemble_system,
    closed_form_solve,
    local_aggregate,
    mse,
    predict,
    share_aggregates,
)
from .sharing import (
    LagrangeBasis,
    SharedMatrix,
    SharedScalar,
    SharedVector,
    SharePolicy,
    make_basis,
    reconstruct,
    share_secret,
)
from .solver import (
    SolveReport,
    insecure_gauss,
    insecure_inverse,
    solve_gauss,
    solve_inverse_method,
)

__version__ = "0.1.0"

__all__ = [
    "Aggregates",
    "BeaverTriple",
    "CostModel",
    "Dataset",
    "ExperimentReport",
    "ExperimentSpec",
    "LagrangeBasis",
    "LeakageScenario",
    "OpeningLedger",
    "PartyDataset",
    "PriorSpec",
    "RandomMask",
    "RegressionConfig",
    "Session",
    "SharePolicy",
    "SharedMatrix",
    "SharedScalar",
    "SharedVector",
    "SolveReport",
    "assemble_system",
    "bundled_housing_path",
    "closed_form_solve",
    "gamma",
    "insecure_gauss",
    "insecure_inverse",
    "leakage_bound",
    "load_csv",
    "local_aggregate",
    "make_basis",
    "mse",
    "normalize",
    "openings_gauss",
    "openings_inverse",
    "predict",
    "reconstruct",
    "reference_leak",
    "run_grid",
    "share_aggregates",
    "share_secret",
    "sigma_x_estimate",
    "solve_gauss",
    "solve_inverse_method",
    "split_and_partition",
    "with_bias",
    "worst_case_adversary",
]
