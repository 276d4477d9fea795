import numpy as np
import pytest

from evidencerank import InvalidInputError, gram, sym_eig
from oracles import gram_triple_loop


def test_gram_two_sample_single_feature():
    assert np.array_equal(gram([[1.0], [-1.0]]), [[2.0]])


def test_gram_identity_rows():
    assert np.array_equal(gram(np.eye(2)), np.eye(2))


def test_gram_matches_triple_loop_oracle():
    rng = np.random.default_rng(0)
    F = rng.standard_normal((5, 3))
    assert np.max(np.abs(gram(F) - gram_triple_loop(F))) <= 1e-12


def test_gram_is_exactly_symmetric():
    rng = np.random.default_rng(1)
    F = rng.standard_normal((40, 7)) * 100
    G = gram(F)
    assert np.array_equal(G, G.T)


def test_gram_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        gram([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(InvalidInputError):
        gram(np.empty((0, 3)))


def test_sym_eig_diagonal():
    eig = sym_eig(np.diag([3.0, 1.0]))
    assert np.allclose(eig.sigma, [3.0, 1.0])
    # identity up to column sign
    assert np.allclose(np.abs(eig.vectors), np.eye(2))


def test_sym_eig_degenerate_spectrum():
    eig = sym_eig(2.0 * np.eye(2))
    assert np.allclose(eig.sigma, [2.0, 2.0])
    assert np.allclose(eig.vectors.T @ eig.vectors, np.eye(2), atol=1e-12)


def test_sym_eig_matches_svd_of_F_oracle():
    rng = np.random.default_rng(2)
    F = rng.standard_normal((10, 4))
    eig = sym_eig(gram(F))
    sv = np.linalg.svd(F, compute_uv=False)
    assert np.allclose(eig.sigma, sv ** 2, rtol=1e-8)


@pytest.mark.parametrize("n,D", [(8, 3), (3, 8), (50, 10), (5, 5), (2, 16)])
def test_eigensystem_invariants(n, D):
    rng = np.random.default_rng(n * 100 + D)
    G = gram(rng.standard_normal((n, D)))
    eig = sym_eig(G)
    scale = max(1.0, np.max(np.abs(G)))
    assert eig.sigma.shape == (D,)
    assert np.all(eig.sigma >= 0)
    assert np.all(np.diff(eig.sigma) <= 0)
    assert np.max(np.abs(eig.vectors.T @ eig.vectors - np.eye(D))) <= 1e-8
    recon = eig.vectors @ np.diag(eig.sigma) @ eig.vectors.T
    assert np.max(np.abs(recon - G)) <= 1e-6 * scale
    if n < D:
        # rank-deficient gram must expose exact zero modes
        assert np.sum(eig.sigma == 0.0) >= D - n


def test_sym_eig_collinear_features():
    rng = np.random.default_rng(3)
    col = rng.standard_normal((20, 1))
    F = np.hstack([col, 2 * col, -col])
    eig = sym_eig(gram(F))
    assert np.sum(eig.sigma == 0.0) == 2


def test_sym_eig_rejects_asymmetric_and_bad_shapes():
    with pytest.raises(InvalidInputError):
        sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        sym_eig(np.ones((2, 3)))
    with pytest.raises(InvalidInputError):
        sym_eig(np.array([[np.inf]]))


def test_eigensystem_is_immutable():
    eig = sym_eig(np.diag([2.0, 1.0]))
    with pytest.raises(ValueError):
        eig.sigma[0] = 5.0
    with pytest.raises(ValueError):
        eig.vectors[0, 0] = 5.0
