"""Special functions: gamma-family functions, Hermite roots, semicircle law."""

import math

import numpy as np
from scipy import special

from .errors import DomainError
from .tridiag import tridiagonal_eigenvalues

__all__ = [
    "HermiteRoots",
    "log_gamma",
    "digamma",
    "trigamma",
    "hermite_roots",
    "semicircle_cdf",
    "semicircle_quantile",
    "semicircle_density",
]


def _positive(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{name} requires x > 0, got {x!r}")
    return arr


def _out(arr):
    return float(arr) if arr.ndim == 0 else arr


def log_gamma(x):
    """Natural log of the Gamma function for x > 0 (scalar or array)."""
    return _out(special.gammaln(_positive(x, "log_gamma")))


def digamma(x):
    """Logarithmic derivative of Gamma, psi(x), for x > 0."""
    return _out(special.psi(_positive(x, "digamma")))


def trigamma(x):
    """Derivative of the digamma function, psi'(x), for x > 0."""
    return _out(special.polygamma(1, _positive(x, "trigamma")))


class HermiteRoots:
    """Roots of the physicists' Hermite polynomial H_n, in increasing order."""

    def __init__(self, order, roots):
        self.order = int(order)
        self.roots = np.asarray(roots, dtype=float)
        if self.roots.shape != (self.order,):
            raise ValueError("expected one root per degree")

    def __repr__(self):
        return f"HermiteRoots(order={self.order}, roots={self.roots!r})"

    def stationarity_residual(self):
        """max_i |sum_{j != i} 1/(y_i - y_j) - y_i|, zero for exact roots."""
        y = self.roots
        if self.order == 1:
            return abs(float(y[0]))
        diff = np.subtract.outer(y, y)
        np.fill_diagonal(diff, np.inf)
        return float(np.max(np.abs(np.sum(1.0 / diff, axis=1) - y)))


def hermite_roots(n):
    """Roots of H_n from the eigenvalues of its symmetric Jacobi matrix.

    The recurrence x H_k = H_{k+1}/2 + k H_{k-1} gives a zero diagonal and
    off-diagonal entries sqrt(k/2). The result is symmetrised about zero.
    """
    n = int(n)
    if n < 1:
        raise DomainError("hermite_roots requires n >= 1")
    if n == 1:
        return HermiteRoots(1, [0.0])
    off = np.sqrt(np.arange(1, n) / 2.0)
    r = np.sort(tridiagonal_eigenvalues(np.zeros(n), off))
    r = 0.5 * (r - r[::-1])
    if n % 2:
        r[n // 2] = 0.0
    return HermiteRoots(n, r)


def semicircle_density(x):
    """Density (1/2pi) sqrt(4 - x^2) on [-2, 2], zero elsewhere."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 2.0
    val = np.zeros_like(x)
    val[inside] = np.sqrt(4.0 - x[inside] ** 2) / (2.0 * math.pi)
    return _out(val)


def semicircle_cdf(x):
    """CDF of the semicircle law on [-2, 2]; clamps to 0 and 1 outside."""
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, -2.0, 2.0)
    val = 0.5 + xc * np.sqrt(4.0 - xc * xc) / (4.0 * math.pi) + np.arcsin(xc / 2.0) / math.pi
    val = np.clip(val, 0.0, 1.0)
    val = np.where(x <= -2.0, 0.0, np.where(x >= 2.0, 1.0, val))
    return _out(val)


def _x_minus_sin(x):
    # Series below 0.5 avoids the cancellation in x - sin(x).
    x2 = x * x
    term = x * x2 / 6.0
    series = term.copy()
    for k in range(2, 9):
        term = -term * x2 / ((2 * k) * (2 * k + 1))
        series = series + term
    return np.where(x < 0.5, series, x - np.sin(x))


def _lower_half_quantile(t):
    # With x = -2 cos(psi/2) the CDF becomes (psi - sin psi) / (2 pi), so the
    # inversion is a Kepler-type equation psi - sin psi = 2 pi t on [0, pi].
    target = 2.0 * math.pi * t
    lo = np.zeros_like(t)
    hi = np.full_like(t, math.pi)
    psi = np.minimum(np.cbrt(6.0 * target), math.pi)
    for _ in range(60):
        g = _x_minus_sin(psi) - target
        lo = np.where(g < 0, psi, lo)
        hi = np.where(g > 0, psi, hi)
        dg = 2.0 * np.sin(0.5 * psi) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            step = g / dg
        # g is convex and increasing, so after one step the iterates approach
        # the root from the right; clamping at pi keeps them in the domain.
        new = np.minimum(psi - step, math.pi)
        bad = ~np.isfinite(new) | (new < lo) | (new > hi)
        new = np.where(bad, 0.5 * (lo + hi), new)
        done = np.abs(new - psi) <= 4.0 * np.finfo(float).eps * np.maximum(psi, 1e-300)
        psi = new
        if np.all(done):
            break
    s = np.sin(psi / 4.0)
    return -2.0 + 4.0 * s * s


def semicircle_quantile(t):
    """Inverse of :func:`semicircle_cdf` for t in (0, 1).

    Newton's method on the angular form of the CDF, falling back to
    bisection whenever a step would leave the current bracket.
    """
    t = np.asarray(t, dtype=float)
    if np.any(~((t > 0) & (t < 1))):
        raise DomainError("semicircle_quantile requires 0 < t < 1")
    low = t <= 0.5
    tt = np.where(low, t, 1.0 - t)
    x = _lower_half_quantile(np.atleast_1d(tt)).reshape(t.shape)
    return _out(np.where(low, x, -x))
