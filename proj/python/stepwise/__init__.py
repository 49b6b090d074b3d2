from ._core import (
    ConstantLadder,
    InvalidArgument,
    ModelError,
    ModelSpec,
    NonMonotoneLadder,
    NumericalError,
    PairConstants,
    SimulationReport,
    beta_stepdown,
    beta_stepup,
    estimate_fwer,
    estimate_reject_at_least,
    grid_maximin,
    holm_bonferroni,
    pair_classify,
    solve_ladder,
    solve_pair_constants,
    stepdown_decide,
    stepup_decide,
    verify,
)

__all__ = [
    "ConstantLadder",
    "InvalidArgument",
    "ModelError",
    "ModelSpec",
    "NonMonotoneLadder",
    "NumericalError",
    "PairConstants",
    "SimulationReport",
    "beta_stepdown",
    "beta_stepup",
    "estimate_fwer",
    "estimate_reject_at_least",
    "grid_maximin",
    "holm_bonferroni",
    "pair_classify",
    "solve_ladder",
    "solve_pair_constants",
    "stepdown_decide",
    "stepup_decide",
    "verify",
]
