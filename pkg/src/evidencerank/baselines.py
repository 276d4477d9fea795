"""Reference transferability scores: LEEP, NCE, and a ridge linear probe.

LEEP and NCE consume the source model's class probabilities over its own
label space (theta, one row per sample). The probe retrains a closed-form
ridge head on the frozen features and reports cross-validated performance.
"""

import warnings

import numpy as np

from .errors import InvalidInputError
from .linalg import gram, sym_eig

THETA_ROW_SUM_TOL = 1e-6


def _check_theta(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 2 or theta.shape[0] < 1 or theta.shape[1] < 1:
        raise InvalidInputError(f"theta must be an n x Z matrix, got shape {theta.shape}")
    if np.any(theta < 0):
        raise InvalidInputError("theta has negative entries")
    sums = theta.sum(axis=1)
    bad = np.where(np.abs(sums - 1.0) > THETA_ROW_SUM_TOL)[0]
    if bad.size:
        raise InvalidInputError(f"theta row {bad[0]} sums to {sums[bad[0]]!r}, expected 1")
    return theta


def _check_labels(y, n: int, name: str = "y") -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != n:
        raise InvalidInputError(f"{name} must be a length-{n} vector, got shape {y.shape}")
    if not np.issubdtype(y.dtype, np.integer):
        yi = y.astype(np.int64)
        if not np.array_equal(yi, y):
            raise InvalidInputError(f"{name} must hold integer class labels")
        y = yi
    if np.any(y < 0):
        raise InvalidInputError(f"{name} has negative labels")
    return y.astype(np.int64)


def leep(theta, y) -> float:
    """Log expected empirical prediction.

    An empirical predictor P(y|z) is estimated from the co-occurrence of
    source probabilities and target labels, then scored in-sample:
    mean_i log sum_z P(y_i|z) theta_i(z). Source classes that receive zero
    total mass are skipped. Always <= 0; equals 0 only when the predictor is
    certain and correct everywhere.
    """
    theta = _check_theta(theta)
    n, Z = theta.shape
    y = _check_labels(y, n)
    C = int(y.max()) + 1

    joint = np.zeros((C, Z))
    np.add.at(joint, y, theta)          # joint[c, z] = sum over samples of class c
    col = joint.sum(axis=0)             # total mass per source class
    cond = np.zeros_like(joint)
    nz = col > 0
    cond[:, nz] = joint[:, nz] / col[nz]

    pred = np.minimum(np.sum(cond[y, :] * theta, axis=1), 1.0)
    return float(np.mean(np.log(pred)))


def nce(z, y) -> float:
    """Negative conditional entropy -H(Y|Z) of target labels given pseudo-labels.

    Computed from the empirical joint distribution; lies in [-log C, 0].
    """
    y = np.asarray(y)
    z = _check_labels(z, np.asarray(y).shape[0], name="z")
    y = _check_labels(y, z.shape[0])
    n = y.shape[0]
    C = int(y.max()) + 1
    Z = int(z.max()) + 1

    counts = np.zeros((C, Z))
    np.add.at(counts, (y, z), 1.0)
    p_yz = counts / n
    p_z = p_yz.sum(axis=0)
    mask = p_yz > 0
    ratio = p_yz[mask] / np.broadcast_to(p_z, p_yz.shape)[mask]
    return float(np.sum(p_yz[mask] * np.log(ratio)))


def argmax_pseudo_labels(theta) -> np.ndarray:
    """Hard pseudo-label per sample; ties go to the smallest index."""
    theta = _check_theta(theta)
    return np.argmax(theta, axis=1).astype(np.int64)


def _is_one_hot(Y) -> bool:
    return (
        Y.ndim == 2 and Y.shape[1] >= 2
        and np.all((Y == 0.0) | (Y == 1.0))
        and np.all(Y.sum(axis=1) == 1.0)
    )


def _fold_assignment(Y, n, folds, one_hot, rng):
    fold_of = np.empty(n, dtype=np.int64)
    if one_hot:
        # stratified: deal each class round-robin after an in-class shuffle
        labels = np.argmax(Y, axis=1)
        for c in np.unique(labels):
            idx = np.where(labels == c)[0]
            rng.shuffle(idx)
            fold_of[idx] = np.arange(idx.size) % folds
    else:
        idx = rng.permutation(n)
        for f, chunk in enumerate(np.array_split(idx, folds)):
            fold_of[chunk] = f
    return fold_of


def linear_probe_score(F, targets, lambdas, folds: int, seed: int = 0):
    """Cross-validated ridge head on frozen features.

    Fits W = (Fc^T Fc + lambda I)^-1 Fc^T Yc on centered training data with
    an unpenalized intercept, for every lambda in the grid, reusing one
    eigendecomposition per fold so the sweep only rebuilds a diagonal.
    Returns (best_lambda, best_score) where score is held-out accuracy for
    one-hot targets and negative MSE otherwise. Deterministic for a fixed
    seed; folds are stratified by class for one-hot targets.
    """
    F = np.asarray(F, dtype=np.float64)
    Y = np.asarray(targets, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    n = F.shape[0]
    if Y.shape[0] != n:
        raise InvalidInputError(f"targets rows {Y.shape[0]} do not match F rows {n}")
    lambdas = np.asarray(lambdas, dtype=np.float64).ravel()
    if lambdas.size == 0 or np.any(lambdas <= 0):
        raise InvalidInputError("lambdas must be a non-empty grid of positive reals")
    if folds < 2:
        raise InvalidInputError("folds must be >= 2")
    if folds > n:
        raise InvalidInputError(f"cannot make {folds} folds out of {n} samples")

    one_hot = _is_one_hot(Y)
    rng = np.random.default_rng(seed)
    fold_of = _fold_assignment(Y, n, folds, one_hot, rng)

    hits = np.zeros(lambdas.size)       # correct counts, or summed squared error
    counted = np.zeros(lambdas.size)

    for f in range(folds):
        test = fold_of == f
        if not np.any(test):
            # stratified dealing can leave a fold empty when every class
            # has fewer samples than there are folds
            continue
        train = ~test
        Xt, Yt = F[train], Y[train]
        xm, ym = Xt.mean(axis=0), Yt.mean(axis=0)
        eig = sym_eig(gram(Xt - xm))
        P = eig.vectors.T @ ((Xt - xm).T @ (Yt - ym))       # D x K projection
        B = (F[test] - xm) @ eig.vectors                     # n_test x D

        if one_hot:
            true_cls = np.argmax(Y[test], axis=1)
            train_cls = set(np.unique(np.argmax(Yt, axis=1)).tolist())
            keep = np.array([c in train_cls for c in true_cls], dtype=bool)
            if not keep.all():
                warnings.warn(
                    f"fold {f}: {int((~keep).sum())} held-out samples belong to classes "
                    "absent from the training split; accuracy computed over present classes"
                )
        for li, lam in enumerate(lambdas):
            preds = B @ (P / (eig.sigma + lam)[:, None]) + ym
            if one_hot:
                pred_cls = np.argmax(preds, axis=1)
                hits[li] += float(np.sum((pred_cls == true_cls) & keep))
                counted[li] += float(keep.sum())
            else:
                hits[li] += float(np.sum((preds - Y[test]) ** 2))
                counted[li] += preds.size

    scores = hits / counted if one_hot else -(hits / counted)
    best = int(np.argmax(scores))
    return float(lambdas[best]), float(scores[best])
