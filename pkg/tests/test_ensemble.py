import math

import numpy as np
import pytest

from loggas.asymptotics import energy_cumulants
from loggas.energy import delta_n
from loggas.ensemble import RngSpec, energy_sample, energy_statistic, monte_carlo, sample_matrix
from loggas.errors import CoincidenceError, DomainError
from loggas.specfn import hermite_roots, log_gamma
from loggas.tridiag import eigenvalues


def test_same_seed_same_matrix():
    a = sample_matrix(30, 1.5, RngSpec(seed=4))
    b = sample_matrix(30, 1.5, RngSpec(seed=4))
    assert a == b
    assert a != sample_matrix(30, 1.5, RngSpec(seed=5))
    assert a != sample_matrix(30, 1.5, RngSpec(seed=4, stream=1))


def test_entry_means():
    n, beta, k = 4, 2.0, 100000
    g = np.random.default_rng(0)
    diag = np.empty((k, n))
    off = np.empty((k, n - 1))
    for r in range(k):
        T = sample_matrix(n, beta, g)
        diag[r], off[r] = T.diag, T.offdiag
    sd = math.sqrt(2 / (beta * n)) / math.sqrt(k)
    assert np.all(np.abs(diag.mean(axis=0)) < 3 * sd)
    assert np.allclose(diag.var(axis=0), 2 / (beta * n), rtol=0.02)
    for i in range(n - 1):
        nu = (n - 1 - i) * beta
        chi_mean = math.sqrt(2) * math.exp(log_gamma((nu + 1) / 2) - log_gamma(nu / 2))
        expect = chi_mean / math.sqrt(beta * n)
        se = off[:, i].std() / math.sqrt(k)
        assert abs(off[:, i].mean() - expect) < 4 * se


def test_small_beta_chi_shapes():
    # beta < 2 gives gamma shapes below 1 in the last off-diagonal entries.
    T = sample_matrix(3, 0.5, np.random.default_rng(1))
    assert np.all(T.offdiag > 0)


def test_energy_statistic_examples():
    assert energy_statistic([-1.0, 1.0]) == pytest.approx(0.5 - math.log(2), abs=1e-15)
    assert energy_statistic(hermite_roots(3).roots) == pytest.approx(0.0662184, abs=1e-7)
    x = np.random.default_rng(2).normal(size=20)
    assert energy_statistic(-x) == pytest.approx(energy_statistic(x), abs=1e-14)
    with pytest.raises(CoincidenceError):
        energy_statistic([0.0, 0.0, 1.0])
    with pytest.raises(DomainError):
        energy_statistic([1.0])


def test_energy_sample_is_bit_identical():
    a = energy_sample(50, 2.0, RngSpec(seed=9), rep=3)
    b = energy_sample(50, 2.0, RngSpec(seed=9), rep=3)
    assert a.E_n == b.E_n and np.array_equal(a.eigenvalues, b.eigenvalues)
    assert a.centered == pytest.approx(50 * (a.E_n - delta_n(50)), abs=1e-12)
    assert a.row()[0] == 3


def test_monte_carlo_independent_of_workers():
    one = monte_carlo(30, 2.0, 12, RngSpec(seed=3), workers=1)
    three = monte_carlo(30, 2.0, 12, RngSpec(seed=3), workers=3)
    assert [s.E_n for s in one] == [s.E_n for s in three]
    assert [s.rep for s in one] == list(range(12))


def test_monte_carlo_prefix_stability():
    short = monte_carlo(20, 1.0, 5, RngSpec(seed=1))
    long = monte_carlo(20, 1.0, 9, RngSpec(seed=1))
    assert [s.E_n for s in short] == [s.E_n for s in long][:5]


def test_monte_carlo_outputs(tmp_path):
    run = monte_carlo(20, 2.0, 6, RngSpec(seed=1))
    s = run.summary()
    assert s["reps"] == 6
    assert s["clt_variance"] == pytest.approx(20 * s["variance"])
    run.write_csv(tmp_path / "a.csv")
    run.write_summary(tmp_path / "a.json")
    assert (tmp_path / "a.csv").read_text().splitlines()[0] == "rep,n,beta,E_n,centered,seed"
    with pytest.raises(DomainError):
        monte_carlo(20, 2.0, 0)


def test_moments_match_exact_cumulants():
    n, beta, reps = 50, 2.0, 2000
    run = monte_carlo(n, beta, reps, RngSpec(seed=17))
    e = np.array([s.E_n for s in run])
    mean, var = energy_cumulants(n, beta)
    assert abs(e.mean() - mean) < 4 * e.std(ddof=1) / math.sqrt(reps)
    # Standard error of a sample variance for a near-Gaussian statistic.
    assert abs(e.var(ddof=1) - var) < 4 * var * math.sqrt(2 / (reps - 1))


@pytest.mark.parametrize("beta", [1.0, 2.0, 4.0])
def test_spectrum_stays_near_the_bulk(beta):
    g = np.random.default_rng(int(beta))
    outside = 0
    for _ in range(334):
        lam = eigenvalues(sample_matrix(100, beta, g))
        outside += bool(lam[0] < -2.5 or lam[-1] > 2.5)
    assert outside / 334 < 0.01


def test_single_sample_bound_holds_for_every_sample():
    from loggas.measures import Empirical, Semicircle, w2

    for rep in range(20):
        s = energy_sample(100, 2.0, RngSpec(seed=21), rep)
        d = delta_n(100)
        bound = math.sqrt(2 * (s.E_n - d)) + math.sqrt(2 * (0.75 - d))
        assert w2(Empirical(s.eigenvalues), Semicircle()) <= bound + 1e-9


def test_rng_spec_validation():
    with pytest.raises(DomainError):
        RngSpec(seed=-1)
    with pytest.raises(DomainError):
        RngSpec(stream=-2)
    assert RngSpec(1).derived_seed(0) != RngSpec(1).derived_seed(1)
    with pytest.raises(DomainError):
        sample_matrix(1, 2.0, 0)
    with pytest.raises(DomainError):
        sample_matrix(5, 0.0, 0)
