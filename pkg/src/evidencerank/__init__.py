"""evidencerank: rank pre-trained models for a task by scoring their features.

The core score is the mean (over target dimensions) normalized log maximum
evidence of a Bayesian linear head on the extracted features. Baselines
(LEEP, NCE, a ridge linear probe), weighted rank-correlation evaluation,
seeded toy generators, and the FeatPack container live alongside it.
"""

from .baselines import argmax_pseudo_labels, leep, linear_probe_score, nce
from .errors import FeatPackError, InvalidInputError, NumericFailureError
from .evidence import (
    EvidenceState,
    LogMEResult,
    SolverOptions,
    log_evidence,
    logme,
    m_step_naive,
    m_step_optimized,
    maximize_evidence,
)
from .io import inspect_featpack, one_hot, read_csv_features, read_featpack, write_featpack
from .linalg import EigenSystem, gram, sym_eig
from .metrics import (
    RankingReport,
    direction_normalize,
    kendall_tau,
    rank_report,
    weighted_tau,
)
from .synthetic import ToyConfig, gen_clusters, gen_random, gen_regression

__version__ = "0.1.0"

__all__ = [
    "EigenSystem",
    "EvidenceState",
    "FeatPackError",
    "InvalidInputError",
    "LogMEResult",
    "NumericFailureError",
    "RankingReport",
    "SolverOptions",
    "ToyConfig",
    "argmax_pseudo_labels",
    "direction_normalize",
    "gen_clusters",
    "gen_random",
    "gen_regression",
    "gram",
    "inspect_featpack",
    "kendall_tau",
    "leep",
    "linear_probe_score",
    "log_evidence",
    "logme",
    "m_step_naive",
    "m_step_optimized",
    "maximize_evidence",
    "nce",
    "one_hot",
    "rank_report",
    "read_csv_features",
    "read_featpack",
    "sym_eig",
    "weighted_tau",
    "write_featpack",
]
