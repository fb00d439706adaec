import numpy as np
import pytest

from gaincap.linalg import (
    EigenConvergenceError,
    as_matrix,
    as_vector,
    characteristic_coefficients,
    controllability_matrix,
    induced_inf_norm,
    mat_mul,
    observability_matrix,
    rank,
    spectral_radius,
)


def test_as_matrix_rejects_bad_input():
    with pytest.raises(ValueError, match="gains"):
        as_matrix([[1.0, np.nan]], "gains")
    with pytest.raises(ValueError):
        as_matrix([], "empty")
    with pytest.raises(ValueError):
        as_matrix([1.0, 2.0], "flat")


def test_as_matrix_is_read_only():
    m = as_matrix([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(ValueError):
        m[0, 0] = 9.0


def test_as_vector():
    v = as_vector([0.3, 0.5], "start")
    assert v.shape == (2,)
    with pytest.raises(ValueError, match="start"):
        as_vector([[0.3], [0.5]], "start")


def test_mat_mul_known_product():
    b = [[-1.5, 2.0], [1.0, -3.0]]
    k = [[0.32, 0.16], [0.24, 0.12]]
    assert np.allclose(mat_mul(b, k), [[0.0, 0.0], [-0.4, -0.2]])


def test_mat_mul_shape_error():
    with pytest.raises(ValueError, match="multiply"):
        mat_mul(np.eye(2), np.ones((3, 2)))


def test_rank_frozen_cases():
    assert rank(np.eye(3)) == 3
    assert rank([[1.0, 2.0], [2.0, 4.0]]) == 1
    assert rank([[-1.5, 2.0], [1.0, -3.0]]) == 2
    assert rank(np.zeros((4, 2))) == 0


def test_rank_matches_numpy_on_random_products():
    rng = np.random.default_rng(7)
    for _ in range(50):
        rows = rng.integers(1, 6)
        cols = rng.integers(1, 6)
        inner = rng.integers(1, 4)
        m = rng.normal(size=(rows, inner)) @ rng.normal(size=(inner, cols))
        assert rank(m) == np.linalg.matrix_rank(m)


def test_rank_of_transpose():
    rng = np.random.default_rng(11)
    for _ in range(20):
        m = rng.normal(size=(rng.integers(1, 7), rng.integers(1, 7)))
        assert rank(m) == rank(m.T)


def test_controllability_matrix_frozen():
    a = [[0.9, 0.0], [0.6, 0.3]]
    b = [[-1.5, 2.0], [1.0, -3.0]]
    got = controllability_matrix(a, b)
    expected = [[-1.5, 2.0, -1.35, 1.8], [1.0, -3.0, -0.6, 0.3]]
    assert got.shape == (2, 4)
    assert np.allclose(got, expected)


def test_observability_matrix_frozen():
    a = [[0.9, 0.0], [0.2, 0.1]]
    c = [[1.0, 1.0]]
    got = observability_matrix(a, c)
    # rows are c, c a, c a^2, ...
    assert got.shape == (2, 2)
    assert np.allclose(got[0], [1.0, 1.0])
    assert np.allclose(got[1], [1.1, 0.1])


def test_characteristic_coefficients_match_numpy():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3, 5, 8):
        m = rng.normal(size=(n, n))
        assert np.allclose(characteristic_coefficients(m), np.poly(m), atol=1e-8)


def test_spectral_radius_frozen_cases():
    assert spectral_radius([[0.9, 0.0], [0.2, 0.1]]) == pytest.approx(0.9)
    assert spectral_radius([[0.5, 0.0], [-1.0, -0.4]]) == pytest.approx(0.5)
    assert spectral_radius([[1.0, 0.0], [0.5, -0.1]]) == pytest.approx(1.0)
    assert spectral_radius([[1.0, -1.0], [0.0, -1.0]]) == pytest.approx(1.0)


def test_spectral_radius_matches_numpy_on_triangular():
    # triangular matrices expose repeated eigenvalues, the hard case for
    # simultaneous root iteration; the increment-based stop keeps the error
    # near multiplicity * tol rather than tol**(1/multiplicity)
    rng = np.random.default_rng(19)
    for _ in range(25):
        n = int(rng.integers(2, 7))
        m = np.triu(rng.normal(size=(n, n)))
        expected = float(np.max(np.abs(np.diag(m))))
        assert spectral_radius(m) == pytest.approx(expected, abs=1e-6)


def test_spectral_radius_similarity_invariant():
    rng = np.random.default_rng(23)
    for _ in range(10):
        m = rng.normal(size=(4, 4))
        t = rng.normal(size=(4, 4)) + 4.0 * np.eye(4)
        sim = np.linalg.solve(t, m @ t)
        assert spectral_radius(sim) == pytest.approx(spectral_radius(m), abs=1e-6)


def test_spectral_radius_rejects_oversized():
    with pytest.raises(ValueError, match="limit"):
        spectral_radius(np.eye(33))


def test_spectral_radius_convergence_budget():
    # a repeated eigenvalue keeps the root increments from ever reaching an
    # absurd tolerance, so the sweep budget must trip
    with pytest.raises(EigenConvergenceError):
        spectral_radius([[1.0, 1.0], [0.0, 1.0]], tol=1e-300)


def test_induced_inf_norm():
    assert induced_inf_norm([[1.0, -1.0], [0.0, -1.0]]) == 2.0
    assert induced_inf_norm([[0.9, 0.0], [0.2, 0.1]]) == pytest.approx(0.9)
    rng = np.random.default_rng(5)
    for _ in range(20):
        m = rng.normal(size=(3, 4))
        x = rng.normal(size=4)
        x /= np.max(np.abs(x))
        assert np.max(np.abs(m @ x)) <= induced_inf_norm(m) + 1e-12
