import math

import numpy as np
import pytest

from loggas.tridiag import TridiagonalSym, eigenvalues, tridiagonal_eigenvalues


def test_one_by_one():
    assert eigenvalues(TridiagonalSym([3.5], [])).tolist() == [3.5]


def test_two_by_two_swap():
    assert np.allclose(eigenvalues(TridiagonalSym([0.0, 0.0], [1.0])), [-1.0, 1.0], atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 7, 40, 200])
def test_toeplitz_closed_form(n):
    a, b = 0.3, 1.7
    lam = eigenvalues(TridiagonalSym(np.full(n, a), np.full(n - 1, b)))
    k = np.arange(1, n + 1)
    ref = np.sort(a + 2 * b * np.cos(k * math.pi / (n + 1)))
    assert np.allclose(lam, ref, atol=1e-12 * n)


def test_random_against_characteristic_polynomial():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(1, 6))
        T = TridiagonalSym(rng.normal(size=n), rng.uniform(0.05, 2.0, n - 1))
        ref = np.sort(np.roots(np.poly(T.dense())).real)
        assert np.allclose(eigenvalues(T), ref, atol=1e-9)


def test_graded_and_clustered_spectra():
    rng = np.random.default_rng(1)
    d = 10.0 ** rng.uniform(-8, 3, 60)
    e = 10.0 ** rng.uniform(-10, 0, 59)
    lam = tridiagonal_eigenvalues(d, e)
    ref = np.linalg.eigvalsh(TridiagonalSym(d, e).dense())
    assert np.allclose(lam, ref, atol=1e-12 * np.abs(ref).max())
    assert np.all(np.diff(lam) >= 0)


def test_trace_and_frobenius_preserved():
    rng = np.random.default_rng(2)
    T = TridiagonalSym(rng.normal(size=150), rng.uniform(0.1, 1, 149))
    lam = eigenvalues(T)
    assert lam.sum() == pytest.approx(T.diag.sum(), abs=1e-10)
    assert np.dot(lam, lam) == pytest.approx(np.sum(T.dense() ** 2), rel=1e-12)


def test_validation():
    with pytest.raises(ValueError):
        TridiagonalSym([1.0, 2.0], [0.0])
    with pytest.raises(ValueError):
        TridiagonalSym([1.0, 2.0], [1.0, 1.0])
    T = TridiagonalSym([1.0, 2.0], [0.5])
    assert T == TridiagonalSym([1.0, 2.0], [0.5])
    assert T.norm() == 2.5
    with pytest.raises(ValueError):
        T.diag[0] = 5.0
