"""Exact moment generating function of the eigenvalue energy and its limits.

For the tridiagonal beta-Hermite ensemble, E[exp(z E_n)] follows from the
Selberg (Mehta) integral: tilting by exp(z E_n) changes the Vandermonde
exponent to beta' = beta - 2z/(n(n-1)) and the Gaussian weight to
exp(-(beta n/4 - z/(2n)) sum x^2), i.e. gamma' = beta/2 - z/(n(n-1)) and
A' = n beta/2 - z/n. Then

    log M(z) = -(n/2)[(n-1) gamma' + 1] log A' + sum_j log Gamma(1 + j gamma')
               - n log Gamma(1 + gamma') - (same at z = 0).
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .energy import delta_n
from .errors import DomainError
from .specfn import digamma, log_gamma, trigamma

__all__ = [
    "MgfDomain",
    "mgf_domain",
    "printed_domain",
    "log_mgf_exact",
    "mgf_exact",
    "energy_cumulants",
    "log_mgf_centered",
    "lln_constant",
    "clt_variance",
    "clt_variance_limit",
    "rate_function",
    "rate_derivative",
    "legendre_transform",
    "scaled_log_mgf",
    "LdpCurve",
    "ldp_curve",
]


def _check(n, beta):
    n = int(n)
    if n < 2:
        raise DomainError("the energy MGF needs n >= 2")
    if not beta > 0:
        raise DomainError("beta must be positive")
    return n, float(beta)


@dataclass(frozen=True)
class MgfDomain:
    """Whether E[exp(z E_n)] is finite, and which factor fails if not."""

    finite: bool
    failed: str = ""

    def __bool__(self):
        return self.finite


def mgf_domain(z, n, beta):
    """Finiteness of the tilted integral: positive power base and gamma arguments."""
    n, beta = _check(n, beta)
    A = n * beta / 2.0 - z / n
    g = beta / 2.0 - z / (n * (n - 1))
    if not A > 0:
        return MgfDomain(False, f"Gaussian weight base n beta/2 - z/n = {A!r} <= 0")
    if not 1.0 + n * g > 0:
        return MgfDomain(False, f"gamma argument 1 + n gamma' = {1.0 + n * g!r} <= 0")
    if not 1.0 + g > 0:
        return MgfDomain(False, f"normalising gamma argument 1 + gamma' = {1.0 + g!r} <= 0")
    return MgfDomain(True)


def printed_domain(z, beta):
    """The printed finiteness condition z < beta/2 (natural for the n^2 z scaling)."""
    return z < beta / 2.0


def _selberg_log(g, A, n, fixed_norm=None):
    j = np.arange(1, n + 1)
    norm = g if fixed_norm is None else fixed_norm
    return (-(n / 2.0) * ((n - 1) * g + 1.0) * math.log(A)
            + math.fsum(log_gamma(1.0 + j * g)) - n * log_gamma(1.0 + norm))


def log_mgf_exact(z, n, beta, variant="selberg"):
    """log E[exp(z E_n)], +inf outside the domain.

    ``variant="printed"`` keeps Gamma(1 + beta/2) as the normaliser of every
    factor in the numerator instead of Gamma(1 + gamma'); it disagrees with
    direct quadrature at n = 2 and is kept only for comparison.
    """
    n, beta = _check(n, beta)
    z = float(z)
    if not mgf_domain(z, n, beta):
        return math.inf
    if variant == "printed" and not printed_domain(z, beta):
        return math.inf
    g0, A0 = beta / 2.0, n * beta / 2.0
    g, A = g0 - z / (n * (n - 1)), A0 - z / n
    fixed = g0 if variant == "printed" else None
    if variant not in ("selberg", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    # z = 0 runs the same arithmetic on both sides, so the difference is exactly 0.
    return _selberg_log(g, A, n, fixed) - _selberg_log(g0, A0, n, fixed)


def mgf_exact(z, n, beta, variant="selberg"):
    """E[exp(z E_n)] for the tridiagonal beta-Hermite ensemble (+inf if divergent)."""
    lm = log_mgf_exact(z, n, beta, variant)
    return math.inf if lm == math.inf else math.exp(lm)


def energy_cumulants(n, beta):
    """Exact mean and variance of E_n from derivatives of log M at z = 0."""
    n, beta = _check(n, beta)
    j = np.arange(1, n + 1)
    g, A = beta / 2.0, n * beta / 2.0
    k = 1.0 / (n * (n - 1))
    mean = (0.5 * math.log(A) + ((n - 1) * g + 1.0) / (2.0 * A) - k * math.fsum(j * digamma(1 + j * g))
            + n * k * digamma(1 + g))
    var = (-1.0 / (2 * n * A) + (-(n - 1) * k * A + ((n - 1) * g + 1.0) / n) / (2 * A * A)
           + k * k * math.fsum(j * j * trigamma(1 + j * g)) - n * k * k * trigamma(1 + g))
    return mean, var


def log_mgf_centered(z, n, beta, variant="corrected"):
    """Explicit large-n expansion of log E[exp(z (E_n - Delta_n))].

    The default keeps every term of order z/n and larger, obtained from
    Stirling's series with the 1/(12 t) correction, so the remainder is
    O(z/n^2). ``variant="printed"`` evaluates the published expansion, which
    omits a term of order z/n.
    """
    n, beta = _check(n, beta)
    z = float(z)
    if not mgf_domain(z, n, beta) or not (beta / 2.0 - z / n ** 2) > 0:
        raise DomainError("z is outside the domain of the expansion")
    if z == 0:
        return 0.0
    b = beta
    if variant == "printed":
        return (z / (n - 1) + z / 2 * math.log1p(1 / (n - 1)) - z / (n - 1) * math.log(b / 2 - z / n ** 2)
                + z * (n + 1) / (2 * (n - 1)) * math.log1p(z / (n * ((n - 1) * n * b / 2 - z)))
                + n * ((n - 1) * b + 1) / 2 * math.log1p(-z / ((n - 1) * (n ** 2 * b / 2 - z)))
                + n * b / 2 * math.log1p(-2 * z / (n * (n - 1) * b))
                - n * (math.log(1 + b / 2 - z / (n * (n - 1))) - math.log(1 + b / 2)))
    if variant != "corrected":
        raise ValueError(f"unknown variant {variant!r}")
    g0 = b / 2.0
    g = g0 - z / (n * (n - 1))
    harmonic = math.fsum(1.0 / np.arange(1, n + 1))
    return (-(n / 2.0) * ((n - 1) * g0 + 1.0) * math.log1p(-2.0 * z / (n * n * b))
            + z / 2.0 * math.log1p(1.0 / (n - 1)) + z / 2.0 * math.log(g0 - z / n ** 2)
            + n * (n + 1) / 2.0 * (g * math.log(g) - g0 * math.log(g0)) + n / 2.0 * math.log(g / g0)
            + z * (n + 1) / (2.0 * (n - 1)) - z / 2.0
            - n * (log_gamma(1.0 + g) - log_gamma(1.0 + g0))
            + harmonic / 12.0 * (1.0 / g - 1.0 / g0))


def lln_constant(beta):
    """Limit of n (E_n - Delta_n): psi(1 + beta/2) - log(beta/2)."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    return float(digamma(1.0 + beta / 2.0) - math.log(beta / 2.0))


def clt_variance(beta):
    """The stated fluctuation variance psi'(1 + beta/2).

    The exact cumulants converge instead to :func:`clt_variance_limit`.
    """
    if not beta > 0:
        raise DomainError("beta must be positive")
    return float(trigamma(1.0 + beta / 2.0))


def clt_variance_limit(beta):
    """Limit of n^3 Var(E_n) from the exact MGF: 2/beta - psi'(1 + beta/2) = R''(0)."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    return 2.0 / beta - float(trigamma(1.0 + beta / 2.0))


def rate_function(z, beta):
    """R(z) = z + w log w - log(Gamma(1 + w)/Gamma(1 + beta/2)) - (beta/2) log(beta/2), w = beta/2 - z.

    +inf for z >= beta/2.
    """
    if not beta > 0:
        raise DomainError("beta must be positive")
    z = float(z)
    if z == 0:
        return 0.0
    w = beta / 2.0 - z
    if not w > 0:
        return math.inf
    h = beta / 2.0
    return z + w * math.log(w) - (log_gamma(1.0 + w) - log_gamma(1.0 + h)) - h * math.log(h)


def rate_derivative(z, beta):
    """R'(z) = psi(1 + beta/2 - z) - log(beta/2 - z); positive and increasing."""
    w = beta / 2.0 - float(z)
    if not w > 0:
        return math.inf
    return float(digamma(1.0 + w) - math.log(w))


def _w_for_slope(t):
    # Solve psi(1 + w) - log w = t for w > 0; the left side decreases from +inf to 0.
    def f(w):
        return float(digamma(1.0 + w)) - math.log(w) - t

    lo, hi = 1.0, 1.0
    while f(lo) < 0:
        lo *= 0.5
    while f(hi) > 0:
        hi *= 2.0
    return brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def legendre_transform(t, beta):
    """R*(t) = sup_z (t z - R(z)).

    R' maps (-inf, beta/2) onto (0, inf), so the sup is attained at the z
    with R'(z) = t when t > 0; for t <= 0 it diverges as z -> -inf.
    """
    if not beta > 0:
        raise DomainError("beta must be positive")
    t = float(t)
    if not t > 0:
        return math.inf
    w = _w_for_slope(t)
    z = beta / 2.0 - w
    return max(t * z - rate_function(z, beta), 0.0) if abs(z) > 0 else 0.0


def scaled_log_mgf(z, n, beta):
    """(1/n) log E[exp(n^2 z (E_n - Delta_n))] from the exact MGF."""
    n, beta = _check(n, beta)
    s = n * n * float(z)
    lm = log_mgf_exact(s, n, beta)
    if lm == math.inf:
        return math.inf
    return (lm - s * delta_n(n)) / n


@dataclass
class LdpCurve:
    """R on a z grid and R* on a t grid."""

    beta: float
    z: np.ndarray
    R: np.ndarray
    t: np.ndarray
    R_star: np.ndarray

    def write_csv(self, rate_path, conjugate_path):
        for path, xs, ys, names in ((rate_path, self.z, self.R, ("z", "R")),
                                    (conjugate_path, self.t, self.R_star, ("t", "R_star"))):
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(names)
                for x, y in zip(xs, ys):
                    writer.writerow([format(float(x), ".17g"), format(float(y), ".17g")])


def ldp_curve(beta, z_grid=None, t_grid=None):
    """Tabulate R and R* (defaults: 201 points on the finite domain and around t = R'(0))."""
    if z_grid is None:
        z_grid = np.linspace(-2.0, 0.95 * beta / 2.0, 201)
    if t_grid is None:
        t0 = lln_constant(beta)
        t_grid = np.linspace(0.1 * t0, 4.0 * t0, 201)
    z_grid = np.asarray(z_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    R = np.array([rate_function(z, beta) for z in z_grid])
    Rs = np.array([legendre_transform(t, beta) for t in t_grid])
    return LdpCurve(float(beta), z_grid, R, t_grid, Rs)
