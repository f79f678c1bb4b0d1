import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from loggas import asymptotics as asy
from loggas.energy import delta_n
from loggas.errors import DomainError

EULER = 0.5772156649015329


def two_point_mgf(z, beta):
    """E[exp(z E_2)] by separating the n = 2 density in rotated coordinates."""
    a = beta / 2.0 - z / 4.0  # beta n / 4 - z / 4 at n = 2

    def radial(zz):
        aa = beta / 2.0 - zz / 4.0

        def f(d):
            return (math.sqrt(2) * d) ** (beta - zz) * math.exp(-aa * d * d)

        opts = dict(epsabs=0, epsrel=1e-13, limit=200)
        return (integrate.quad(f, 0, 1, **opts)[0] + integrate.quad(f, 1, np.inf, **opts)[0]) / math.sqrt(aa)

    if not a > 0:
        return math.inf
    return radial(z) / radial(0.0)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 4.0])
@pytest.mark.parametrize("z", [-2.0, -0.3, 0.3, 1.2])
def test_exact_mgf_against_two_point_integral(beta, z):
    expect = two_point_mgf(z, beta)
    if expect == math.inf:
        assert asy.mgf_exact(z, 2, beta) == math.inf
    else:
        assert asy.mgf_exact(z, 2, beta) == pytest.approx(expect, rel=1e-10)


def test_normalisation_is_exact():
    for n in (2, 3, 17, 100, 1000):
        for beta in (0.3, 1.0, 2.0, 7.0):
            assert asy.mgf_exact(0.0, n, beta) == 1.0
            assert asy.log_mgf_exact(0.0, n, beta, variant="printed") == 0.0


def test_printed_normaliser_disagrees_with_quadrature():
    for z, right in ((-1.0, 0.913472), (-0.3, 0.964673), (0.3, 1.046863)):
        assert asy.mgf_exact(z, 2, 2.0) == pytest.approx(right, abs=1e-6)
        assert abs(asy.mgf_exact(z, 2, 2.0, variant="printed") - right) > 0.01


def test_domains():
    # For fixed n the tilted integral stays finite well past beta/2.
    assert asy.mgf_domain(5.0, 10, 2.0)
    assert not asy.printed_domain(5.0, 2.0)
    assert asy.printed_domain(0.5, 2.0)
    d = asy.mgf_domain(10.0 ** 6, 10, 2.0)
    assert not d and d.failed
    assert asy.mgf_exact(10.0 ** 6, 10, 2.0) == math.inf
    assert asy.mgf_exact(5.0, 10, 2.0, variant="printed") == math.inf
    # Past the Vandermonde threshold 1 + n gamma' <= 0 at n = 2, beta = 2: z >= 3.
    assert two_point_mgf(2.9, 2.0) == pytest.approx(asy.mgf_exact(2.9, 2, 2.0), rel=1e-8)
    assert asy.mgf_exact(3.0, 2, 2.0) == math.inf
    with pytest.raises(ValueError):
        asy.log_mgf_exact(0.1, 5, 2.0, variant="other")
    with pytest.raises(DomainError):
        asy.mgf_exact(0.1, 1, 2.0)


def _mp_log_mgf(z, n, beta):
    def part(g, A):
        return (-(mpmath.mpf(n) / 2) * ((n - 1) * g + 1) * mpmath.log(A)
                + mpmath.fsum(mpmath.loggamma(1 + j * g) for j in range(1, n + 1)) - n * mpmath.loggamma(1 + g))

    g0, A0 = mpmath.mpf(beta) / 2, mpmath.mpf(n) * beta / 2
    return part(g0 - z / (n * (n - 1)), A0 - z / n) - part(g0, A0)


@pytest.mark.parametrize("n,beta", [(2, 2.0), (7, 1.0), (50, 4.0), (300, 2.0)])
def test_cumulants_match_high_precision_derivatives(n, beta):
    mean, var = asy.energy_cumulants(n, beta)
    with mpmath.workdps(40):
        d1 = mpmath.diff(lambda z: _mp_log_mgf(z, n, beta), 0, 1)
        d2 = mpmath.diff(lambda z: _mp_log_mgf(z, n, beta), 0, 2)
        assert float(_mp_log_mgf(mpmath.mpf("0.7"), n, beta)) == pytest.approx(asy.log_mgf_exact(0.7, n, beta),
                                                                              rel=1e-9)
    assert mean == pytest.approx(float(d1), rel=1e-12)
    assert var == pytest.approx(float(d2), rel=1e-10)


def test_cumulant_limits():
    for beta in (1.0, 2.0, 4.0):
        mean, var = asy.energy_cumulants(4000, beta)
        assert 4000 * (mean - delta_n(4000)) == pytest.approx(asy.lln_constant(beta), abs=2e-3)
        assert 4000 ** 3 * var == pytest.approx(asy.clt_variance_limit(beta), rel=5e-3)
        far = abs(200 ** 3 * asy.energy_cumulants(200, beta)[1] - asy.clt_variance_limit(beta))
        assert abs(4000 ** 3 * var - asy.clt_variance_limit(beta)) < far / 5
        # The stated constant is not the limit.
        assert abs(asy.clt_variance(beta) - asy.clt_variance_limit(beta)) > 0.1


def test_centered_expansion():
    assert asy.log_mgf_centered(0.0, 50, 2.0) == 0.0
    exact = asy.log_mgf_exact(1.0, 50, 2.0) - delta_n(50)
    assert abs(asy.log_mgf_centered(1.0, 50, 2.0) - exact) <= 10 / 50 ** 2
    # The published form misses an O(z/n) term.
    assert abs(asy.log_mgf_centered(1.0, 50, 2.0, variant="printed") - exact) > 10 / 50 ** 2
    for beta in (1.0, 2.0, 4.0):
        errs = [n * n * abs(asy.log_mgf_centered(1.0, n, beta) - (asy.log_mgf_exact(1.0, n, beta) - delta_n(n)))
                for n in (25, 50, 100, 200)]
        assert max(errs) < 0.2  # remainder O(z / n^2)
    with pytest.raises(DomainError):
        asy.log_mgf_centered(1e4, 10, 2.0)


def test_n_times_z_limit():
    for beta in (1.0, 2.0, 4.0):
        target = asy.lln_constant(beta)
        vals = [asy.log_mgf_exact(n * 1.0, n, beta) - n * delta_n(n) for n in (50, 100, 200, 400)]
        gaps = [abs(v - target) for v in vals]
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] < 0.05


def test_lln_constant_examples():
    assert asy.lln_constant(2.0) == pytest.approx(1 - EULER, abs=1e-12)
    assert asy.lln_constant(1.0) == pytest.approx(2 - EULER - math.log(2), abs=1e-12)
    assert asy.lln_constant(1000.0) == pytest.approx(0.0010, abs=5e-5)
    vals = [asy.lln_constant(b) for b in (1, 2, 4, 10, 100, 1000)]
    assert vals == sorted(vals, reverse=True)
    with pytest.raises(DomainError):
        asy.lln_constant(0.0)


def test_clt_variance_examples():
    assert asy.clt_variance(2.0) == pytest.approx(math.pi ** 2 / 6 - 1, abs=1e-12)
    assert asy.clt_variance(1.0) == pytest.approx(math.pi ** 2 / 2 - 4, abs=1e-12)
    assert asy.clt_variance(4.0) == pytest.approx(math.pi ** 2 / 6 - 1.25, abs=1e-12)
    assert asy.clt_variance_limit(2.0) == pytest.approx(1 - (math.pi ** 2 / 6 - 1), abs=1e-12)


@pytest.mark.parametrize("beta", [1.0, 2.0, 4.0])
def test_rate_function(beta):
    assert asy.rate_function(0.0, beta) == 0.0
    assert asy.rate_function(beta / 2, beta) == math.inf
    assert asy.rate_function(beta, beta) == math.inf
    h = 1e-6
    fd = (asy.rate_function(h, beta) - asy.rate_function(-h, beta)) / (2 * h)
    assert fd == pytest.approx(asy.lln_constant(beta), abs=1e-6)
    for z in (-1.0, 0.1, 0.4 * beta):
        fd = (asy.rate_function(z + h, beta) - asy.rate_function(z - h, beta)) / (2 * h)
        assert asy.rate_derivative(z, beta) == pytest.approx(fd, abs=1e-6)
    # R''(0) is the exact fluctuation constant.
    h = 1e-4
    d2 = (asy.rate_function(h, beta) - 2 * asy.rate_function(0.0, beta) + asy.rate_function(-h, beta)) / h ** 2
    assert d2 == pytest.approx(asy.clt_variance_limit(beta), rel=1e-5)


@pytest.mark.parametrize("beta", [1.0, 2.0, 4.0])
def test_legendre_transform(beta):
    t0 = asy.lln_constant(beta)
    assert asy.legendre_transform(t0, beta) == pytest.approx(0.0, abs=1e-12)
    for t in np.linspace(0.05, 5.0, 30):
        assert asy.legendre_transform(t, beta) >= 0
    assert asy.legendre_transform(-1.0, beta) == math.inf
    for z in (-1.0, -0.5, 0.0, 0.2 * beta / 2):
        slope = asy.rate_derivative(z, beta)
        assert asy.rate_function(z, beta) + asy.legendre_transform(slope, beta) == pytest.approx(z * slope, abs=1e-6)


@pytest.mark.parametrize("beta", [1.0, 2.0, 4.0])
def test_scaled_log_mgf_trend(beta):
    for z in (-0.5, 0.25 * beta):
        target = asy.rate_function(z, beta)
        gaps = [abs(asy.scaled_log_mgf(z, n, beta) - target) for n in (20, 50, 100)]
        assert gaps[0] > gaps[1] > gaps[2]


def test_ldp_curve(tmp_path):
    c = asy.ldp_curve(2.0)
    assert c.R.size == 201 and c.R_star.size == 201
    assert np.all(np.diff(c.R, 2) > 0)
    assert np.all(np.diff(c.R_star, 2) > 0)
    c.write_csv(tmp_path / "r.csv", tmp_path / "s.csv")
    assert (tmp_path / "r.csv").read_text().startswith("z,R\n")
    assert (tmp_path / "s.csv").read_text().startswith("t,R_star\n")
