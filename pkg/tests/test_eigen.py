import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.eigen import _off_norm, eigenvalues_sym
from core.gram import sawtooth_gram


@pytest.mark.parametrize("n", [1, 2, 5, 16, 33])
def test_matches_reference_solver(n):
    rng = np.random.default_rng(n)
    a = rng.standard_normal((n, n))
    a = a + a.T
    assert_allclose(eigenvalues_sym(a), np.linalg.eigvalsh(a), atol=1e-12 * max(1.0, np.linalg.norm(a)))


def test_diagonal_and_zero_matrices():
    assert_allclose(eigenvalues_sym(np.diag([3.0, -1.0, 2.0])), [-1.0, 2.0, 3.0])
    assert_allclose(eigenvalues_sym(np.zeros((3, 3))), [0.0, 0.0, 0.0])
    assert eigenvalues_sym(np.zeros((0, 0))).size == 0


def test_known_spectrum():
    # 1 +- 1/9 on the odd block {1, 3} of the normalised sawtooth Gram matrix
    a = np.array([[1.0, 1.0 / 9.0], [1.0 / 9.0, 1.0]])
    assert_allclose(eigenvalues_sym(a), [8.0 / 9.0, 10.0 / 9.0], atol=1e-15)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        eigenvalues_sym(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eigenvalues_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_sweep_cap():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((12, 12))
    with pytest.raises(RuntimeError):
        eigenvalues_sym(a + a.T, max_sweeps=1)


def test_off_diagonal_norm_survives_a_dominant_diagonal():
    a = np.array([[1.0, 1e-9], [1e-9, 1.0 + 1e-16]])
    assert _off_norm(a) == pytest.approx(math.sqrt(2.0) * 1e-9, rel=1e-12)
    assert _off_norm(np.diag([5.0, 7.0])) == 0.0


@pytest.mark.parametrize("start", range(1, 261, 20))
def test_sawtooth_gram_spectra_match_reference_solver(start):
    for N in range(start, start + 20):
        matrix = sawtooth_gram("C", N, exact=False)
        values = matrix.to_float()
        expected = np.linalg.eigvalsh(values)
        assert_allclose(matrix.eigenvalues(), expected, atol=1e-12 * max(1.0, np.linalg.norm(values)))
