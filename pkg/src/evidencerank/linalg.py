"""Dense symmetric linear algebra used by the evidence core.

Everything is computed in float64 regardless of the input dtype; the
fixed-point iteration downstream is not reliable in single precision.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericFailureError

# Eigenvalues below EIG_CLAMP_REL * max|G| are treated as exact zeros.
EIG_CLAMP_REL = 1e-10


@dataclass(frozen=True)
class EigenSystem:
    """Eigendecomposition of a D x D PSD gram matrix, eigenvalues descending.

    sigma:   (D,) nonnegative eigenvalues, largest first
    vectors: (D, D) orthogonal matrix, column i pairs with sigma[i]

    Immutable (arrays are marked read-only) and safe to share across threads.
    Column signs are arbitrary; every consumer in this package is
    sign-invariant.
    """

    sigma: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]


def _as_float64_matrix(F, name: str) -> np.ndarray:
    F = np.asarray(F, dtype=np.float64)
    if F.ndim != 2 or F.shape[0] < 1 or F.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a 2-D matrix with n >= 1, D >= 1, got shape {F.shape}")
    if not np.all(np.isfinite(F)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return F


def gram(F) -> np.ndarray:
    """Return F^T F, explicitly symmetrized to kill round-off asymmetry."""
    F = _as_float64_matrix(F, "F")
    G = F.T @ F
    return (G + G.T) / 2.0


def sym_eig(G) -> EigenSystem:
    """Eigendecompose a symmetric PSD matrix; clamp noise-level eigenvalues to 0.

    Eigenvalues smaller than 1e-10 * max|G| are set to exact zero so that
    rank-deficient inputs report clean zero modes. Raises NumericFailureError
    with basic condition diagnostics if LAPACK does not converge.
    """
    G = np.asarray(G, dtype=np.float64)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise InvalidInputError(f"G must be square, got shape {G.shape}")
    if not np.all(np.isfinite(G)):
        raise InvalidInputError("G contains non-finite entries")
    norm_max = float(np.max(np.abs(G))) if G.size else 0.0
    if float(np.max(np.abs(G - G.T))) > 1e-8 * max(1.0, norm_max):
        raise InvalidInputError("G is not symmetric")

    try:
        w, V = np.linalg.eigh(G)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError(
            f"eigendecomposition failed for {G.shape[0]}x{G.shape[0]} matrix "
            f"(max|G|={norm_max:.3e}, trace={float(np.trace(G)):.3e}): {exc}"
        ) from exc

    # eigh returns ascending order; flip to descending and clamp the floor
    w = w[::-1].copy()
    V = V[:, ::-1].copy()
    w[w < EIG_CLAMP_REL * norm_max] = 0.0
    w.setflags(write=False)
    V.setflags(write=False)
    return EigenSystem(sigma=w, vectors=V)
