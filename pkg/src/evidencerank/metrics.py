"""Rank correlation between assessment scores and ground-truth performance.

Both statistics are exact O(M^2) pairwise evaluations; M is the number of
candidate models, typically around ten, so there is nothing to optimize.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class RankingReport:
    scores: np.ndarray
    truths: np.ndarray               # after direction normalization
    higher_truth_better: bool
    tau: float
    tau_w: float
    concordant_fraction: float | None   # None when any tie is present


def _check_pair(S, T):
    S = np.asarray(S, dtype=np.float64).ravel()
    T = np.asarray(T, dtype=np.float64).ravel()
    if S.shape[0] != T.shape[0]:
        raise InvalidInputError(f"length mismatch: {S.shape[0]} vs {T.shape[0]}")
    if S.shape[0] < 2:
        raise InvalidInputError("need at least 2 items")
    return S, T


def kendall_tau(S, T) -> float:
    """Plain Kendall tau: (concordant - discordant) / (M choose 2).

    Tied pairs contribute zero, matching sgn(0) = 0 in the pairwise sum.
    """
    S, T = _check_pair(S, T)
    M = S.shape[0]
    i, j = np.triu_indices(M, k=1)
    prod = np.sign(S[i] - S[j]) * np.sign(T[i] - T[j])
    concordant = int(np.sum(prod > 0))
    discordant = int(np.sum(prod < 0))
    return (concordant - discordant) / (M * (M - 1) // 2)


def _ranks_desc(primary, secondary) -> np.ndarray:
    # rank 0 = largest primary; ties broken by larger secondary, then index
    M = primary.shape[0]
    order = np.lexsort((np.arange(M), -secondary, -primary))
    ranks = np.empty(M, dtype=np.int64)
    ranks[order] = np.arange(M)
    return ranks


def _weighted_tau_ranked(S, T, ranks) -> float:
    i, j = np.triu_indices(S.shape[0], k=1)
    w = 1.0 / (1.0 + ranks[i]) + 1.0 / (1.0 + ranks[j])
    num = float(np.sum(w * np.sign(S[i] - S[j]) * np.sign(T[i] - T[j])))
    return num / float(np.sum(w))


def weighted_tau(S, T) -> float:
    """Top-weighted Kendall tau with additive hyperbolic pair weights.

    Pair (i, j) weighs 1/(1+r_i) + 1/(1+r_j) with r the descending rank
    (larger value = rank 0), so disagreements among top-ranked items cost
    more. The statistic is symmetrized: the mean of the value computed with
    ranks taken from the S ordering and from the T ordering.
    """
    S, T = _check_pair(S, T)
    by_s = _weighted_tau_ranked(S, T, _ranks_desc(S, T))
    by_t = _weighted_tau_ranked(S, T, _ranks_desc(T, S))
    return 0.5 * (by_s + by_t)


def direction_normalize(T, higher_truth_better: bool = True) -> np.ndarray:
    """Negate truths measured the wrong way around (e.g. MSE), else pass through."""
    T = np.asarray(T, dtype=np.float64)
    return T.copy() if higher_truth_better else -T


def rank_report(scores, truths, higher_truth_better: bool = True) -> RankingReport:
    """Evaluate a scoring method against ground truth.

    concordant_fraction is (tau + 1) / 2, the probability that the
    truly-better model also scored higher; it is reported only when both
    vectors are tie-free, where that identity is literal.
    """
    S, T_raw = _check_pair(scores, truths)
    T = direction_normalize(T_raw, higher_truth_better)
    tau = kendall_tau(S, T)
    tau_w = weighted_tau(S, T)
    tie_free = (np.unique(S).size == S.size) and (np.unique(T).size == T.size)
    cf = (tau + 1.0) / 2.0 if tie_free else None
    S.setflags(write=False)
    T.setflags(write=False)
    return RankingReport(
        scores=S, truths=T, higher_truth_better=higher_truth_better,
        tau=tau, tau_w=tau_w, concordant_fraction=cf,
    )
