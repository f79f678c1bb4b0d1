"""Log-gas energies: potentials, kernels, discrete and continuous energies.

The continuous interaction integral is computed in quantile coordinates.
For the log kernel, log|q(u) - q(v)| = log|u - v| + log D(u, v) with D
the divided difference of the quantile function; the first part integrates
to -3/2 in closed form and D is smooth on each panel pair.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import quadrature
from .errors import CoincidenceError, DomainError, QuadratureError
from .measures import Empirical, Semicircle

__all__ = [
    "Potential",
    "Kernel",
    "EnergyValue",
    "LOG",
    "discrete_energy",
    "continuous_energy",
    "delta_n",
    "delta_n_sequence",
    "interpolation_f",
]

TWO_PI = 2.0 * math.pi


class Potential:
    """Confining potential Q with Q(x) - rho x^2 convex.

    ``minimizer`` and ``min_energy`` hold the equilibrium measure and the
    minimum energy when they are known in closed form.
    """

    def __init__(self, Q, dQ=None, d2Q=None, rho=0.0, label="custom",
                 minimizer=None, min_energy=None, on_circle=False):
        self._Q, self._dQ, self._d2Q = Q, dQ, d2Q
        self.rho = float(rho)
        self.label = label
        self.minimizer = minimizer
        self.min_energy = min_energy
        self.on_circle = on_circle

    def __repr__(self):
        return f"Potential({self.label!r}, rho={self.rho!r})"

    def __call__(self, x):
        return self._Q(np.asarray(x, dtype=float))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self._dQ is not None:
            return self._dQ(x)
        h = 1e-6 * np.maximum(1.0, np.abs(x))
        return (self._Q(x + h) - self._Q(x - h)) / (2 * h)

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self._d2Q is not None:
            return self._d2Q(x) * np.ones_like(x)
        h = 1e-4 * np.maximum(1.0, np.abs(x))
        return (self.derivative(x + h) - self.derivative(x - h)) / (2 * h)

    def is_rho_convex(self, lo=-5.0, hi=5.0, points=1000, tol=1e-8):
        """Second differences of Q(x) - rho x^2 on a grid are >= -tol."""
        x = np.linspace(lo, hi, points)
        g = self(x) - self.rho * x * x
        return bool(np.all(np.diff(g, 2) >= -tol))

    @classmethod
    def quadratic(cls, c=0.5):
        """Q(x) = c x^2; equilibrium is the semicircle of radius sqrt(2 / c)."""
        c = float(c)
        if not c > 0:
            raise DomainError("quadratic potential needs c > 0")
        return cls(lambda x: c * x * x, lambda x: 2 * c * x, lambda x: 2 * c + 0 * x,
                   rho=c, label=f"quadratic:{c!r}",
                   minimizer=Semicircle(0.0, math.sqrt(2.0 / c)),
                   min_energy=0.75 + 0.5 * math.log(2.0 * c))

    @classmethod
    def quartic(cls, a, b):
        """Q(x) = a x^4 + b x^2 with a >= 0, b > 0 (so rho = b)."""
        a, b = float(a), float(b)
        if a < 0 or not b > 0:
            raise DomainError("quartic potential needs a >= 0 and b > 0")
        return cls(lambda x: a * x ** 4 + b * x * x, lambda x: 4 * a * x ** 3 + 2 * b * x,
                   lambda x: 12 * a * x * x + 2 * b, rho=b, label=f"quartic:{a!r},{b!r}")

    @classmethod
    def zero(cls):
        """Q = 0 on the circle; the equilibrium is the Haar measure."""
        from .circle import haar

        return cls(lambda x: 0.0 * x, lambda x: 0.0 * x, lambda x: 0.0 * x, rho=0.0,
                   label="zero", minimizer=haar(), min_energy=0.0, on_circle=True)

    @classmethod
    def cosine(cls, a):
        """Q(angle) = a cos(angle) on the circle, |a| < 1/2.

        The equilibrium density is (1 - a cos x) / (2 pi) with energy -a^2/4.
        """
        from .circle import CircularMeasure, CosineDensity

        a = float(a)
        if not abs(a) < 0.5:
            raise DomainError("cosine potential needs |a| < 1/2 so that rho > -1/4")
        return cls(lambda x: a * np.cos(x), lambda x: -a * np.sin(x), lambda x: -a * np.cos(x),
                   rho=-abs(a) / 2.0, label=f"cosine:{a!r}",
                   minimizer=CircularMeasure(CosineDensity(a), 0.0),
                   min_energy=-a * a / 4.0, on_circle=True)


class Kernel:
    """Interaction kernel K on (0, inf); the energy subtracts the double integral of K."""

    def __init__(self, label="log", alpha=None):
        if label not in ("log", "riesz", "invlog"):
            raise DomainError(f"unknown kernel {label!r}")
        if label == "riesz" and not (alpha is not None and alpha > 0):
            raise DomainError("riesz kernel needs alpha > 0")
        self.label = label
        self.alpha = None if alpha is None else float(alpha)

    def __repr__(self):
        return f"Kernel({self.label!r})" if self.alpha is None else f"Kernel({self.label!r}, alpha={self.alpha!r})"

    def __call__(self, d):
        d = np.asarray(d, dtype=float)
        if self.label == "log":
            return np.log(d)
        if self.label == "riesz":
            return -(d ** -self.alpha)
        return -1.0 / np.log1p(d * d)

    def is_concave(self, lo=1e-3, hi=50.0, points=1000):
        x = np.geomspace(lo, hi, points)
        # Concavity on a nonuniform grid: slopes must not increase.
        k = self(x)
        slopes = np.diff(k) / np.diff(x)
        return bool(np.all(np.diff(slopes) <= 1e-12 * np.maximum(1.0, np.abs(slopes[:-1]))))

    @classmethod
    def riesz(cls, alpha):
        return cls("riesz", alpha)

    @classmethod
    def invlog(cls):
        return cls("invlog")


LOG = Kernel("log")


@dataclass(frozen=True)
class EnergyValue:
    """Energy split into its potential and interaction parts."""

    potential: float
    interaction: float
    quadrature_error: float = 0.0
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", self.potential + self.interaction)

    def to_dict(self):
        return {"potential": self.potential, "interaction": self.interaction,
                "total": self.total, "quadrature_error": self.quadrature_error}


def _as_points(x):
    pts = getattr(x, "points", x)
    return np.asarray(pts, dtype=float).ravel()


def discrete_energy(x, Q, K=LOG):
    """(1/n) sum Q(x_i) - 2/(n(n-1)) sum_{i<j} K(|x_i - x_j|)."""
    x = _as_points(x)
    n = x.size
    if n < 2:
        raise DomainError("discrete energy needs n >= 2")
    xs = np.sort(x)
    if np.any(np.diff(xs) == 0):
        raise CoincidenceError("configuration has coinciding points")
    i, j = np.triu_indices(n, 1)
    pair = float(np.sum(K(np.abs(x[i] - x[j]))))
    return EnergyValue(float(np.mean(Q(x))), -2.0 * pair / (n * (n - 1)))


# -- continuous energies ---------------------------------------------------


def _log_pair_integral(rule, sample, circle=False):
    """Integral over {v < u} of log(K(q(u) - q(v)) / (u - v)) for the log kernel.

    On the circle the kernel distance is the chord |2 sin(d/2)|.
    """
    a, b = rule.lower_pairs
    wab, log_du = rule.lower_pair_weights
    d = sample.q[a] - sample.q[b]
    u, v, w = rule.duffy()
    dd = sample.q_du - sample.q_dv
    with np.errstate(divide="ignore", invalid="ignore"):
        if circle:
            chord = 2.0 * np.sin(0.5 * np.minimum(d, TWO_PI - d))
            off = np.dot(wab, np.log(chord) - log_du)
            diag = np.dot(w, np.log(dd) - np.log(u - v) + _sinc_log(dd))
        else:
            off = np.dot(wab, np.log(d) - log_du)
            diag = np.dot(w, np.log(dd) - np.log(u - v))
    return off + diag


def _sinc_log(d):
    # log(sin(d/2) / (d/2)) for 0 < d < 2 pi.
    far = d > math.pi
    with np.errstate(divide="ignore", invalid="ignore"):
        near_val = np.log(np.sinc(d / TWO_PI))
        far_val = np.log(np.sin(0.5 * (TWO_PI - d))) - np.log(0.5 * d)
    return np.where(far, far_val, near_val)


def _riesz_pair_integral(rule, sample, alpha):
    """Integral over {v < u} of |q(u) - q(v)|^(-alpha), 0 < alpha < 1.

    Writing |q(u) - q(v)| = (u - v) D(u, v) isolates the singular factor
    (u - v)^(-alpha). Diagonal triangles and the corners shared by adjacent
    panels are Duffy-mapped so that factor becomes a Gauss-Jacobi weight;
    all remaining panel pairs are smooth.
    """
    m = rule.order
    edges, h = rule.edges, rule.lengths
    P = h.size
    nodes, weights, panel = rule.nodes_weights()
    a, b = rule.lower_pairs
    wab, _ = rule.lower_pair_weights
    far = panel[a] - panel[b] > 1
    off = np.dot(wab[far], np.abs(sample.q[a[far]] - sample.q[b[far]]) ** -alpha)

    def D(u, v):
        return (sample.quantile(u) - sample.quantile(v)) / (u - v)

    # Diagonal triangles: u = c + h x, v = c + h x (1 - y), u - v = h x y.
    xg, wx = special.roots_sh_jacobi(m, 2.0 - alpha, 2.0 - alpha)
    yg, wy = special.roots_sh_jacobi(m, 1.0 - alpha, 1.0 - alpha)
    X, Y = (g.ravel() for g in np.meshgrid(xg, yg, indexing="ij"))
    W = np.outer(wx, wy).ravel()
    c0, hh = edges[:-1, None], h[:, None]
    u = c0 + hh * X
    v = c0 + hh * X * (1 - Y)
    diag = np.sum(hh ** (2.0 - alpha) * W * D(u, v) ** -alpha)
    # Adjacent panels meet at the corner u = v = e: with s = u - e in [0, h1]
    # and t = e - v in [0, h0], split along s/h1 = t/h0 and Duffy-map each half.
    xg, wx = special.roots_sh_jacobi(m, 2.0 - alpha, 2.0 - alpha)
    yg, wy = quadrature._gauss01(m)
    X, Y = (g.ravel() for g in np.meshgrid(xg, yg, indexing="ij"))
    W = np.outer(wx, wy).ravel()
    corner = 0.0
    if P > 1:
        e = edges[1:-1, None]
        h0, h1 = h[:-1, None], h[1:, None]
        # Half with s = h1 x, t = h0 x y, so u - v = x (h1 + h0 y).
        u, v = e + h1 * X, e - h0 * X * Y
        corner += np.sum(h1 * h0 * W * (h1 + h0 * Y) ** -alpha * D(u, v) ** -alpha)
        # Mirrored half with t = h0 x, s = h1 x y.
        u, v = e + h1 * X * Y, e - h0 * X
        corner += np.sum(h1 * h0 * W * (h0 + h1 * Y) ** -alpha * D(u, v) ** -alpha)
    return off + diag + corner


def _line_terms(rule, sample, Q, K, circle=False):
    _, weights, _ = rule.nodes_weights()
    pot = float(np.dot(weights, Q(sample.q)))
    if K.label == "log":
        inter = 1.5 - 2.0 * _log_pair_integral(rule, sample, circle)
    elif K.label == "riesz":
        if K.alpha >= 1.0 or circle:
            return pot, math.inf
        inter = 2.0 * _riesz_pair_integral(rule, sample, K.alpha)
    else:
        # 1/log(1 + d^2) ~ 1/d^2 is not integrable across the diagonal.
        return pot, math.inf
    return pot, float(inter)


def _atomic_potential(m, Q):
    return float(np.dot(m.weights, Q(m.atoms)))


def continuous_energy(m, Q, K=LOG, tol=1e-7):
    """E^Q(m) = integral of Q - double integral of K(|x - y|).

    ``m`` is a line measure or a circular measure; measures with atoms have
    infinite energy. Raises :class:`QuadratureError` when the difference
    between two rule orders exceeds ``tol`` relative to max(1, |E|).
    """
    from .circle import CircularMeasure

    circle = isinstance(m, CircularMeasure)
    line = m.lift if circle else m
    if line.atomic:
        pot = _atomic_potential(line, Q) if isinstance(line, Empirical) else math.nan
        return EnergyValue(pot, math.inf)
    results = []
    singular = line.singular_breakpoints
    if circle:
        # The chord kernel is also singular where the lifted distance nears 2 pi,
        # at the corner u = 1, v = 0.
        singular = np.union1d(singular, [0.0, 1.0])
    rules = quadrature.rules(line.breakpoints, singular)
    for rule in rules:
        sample = _Sample.of(line, rule, need_quantile=K.label == "riesz")
        results.append(_line_terms(rule, sample, Q, K, circle))
    (p0, i0), (p1, i1) = results
    if not math.isfinite(i1):
        return EnergyValue(p1, i1)
    err = abs(p1 - p0) + abs(i1 - i0)
    value = EnergyValue(p1, i1, err)
    if tol is not None and err > tol * max(1.0, abs(value.total)):
        raise QuadratureError(f"energy error estimate {err:.3g} exceeds tolerance", )
    return value


class _Sample(quadrature.QuantileSample):
    """QuantileSample that can also evaluate the quantile at extra points."""

    measure = None

    @classmethod
    def of(cls, measure, rule, need_quantile=False):
        base = quadrature.QuantileSample.of(measure._quantile, rule)
        s = cls(rule, base.q, base.q_du, base.q_dv)
        s.measure = measure
        return s

    def quantile(self, u):
        return self.measure._quantile(u)


# -- closed-form minimum discrete energy -----------------------------------


def delta_n(n):
    """Minimum discrete energy for Q(x) = x^2/2 with n points.

    1/2 (1 + log(n - 1)) - 1/(n(n-1)) sum_{j<=n} j log j, evaluated in the
    equivalent Riemann-sum form for large n to limit cancellation.
    """
    n = int(n)
    if n < 2:
        raise DomainError("delta_n needs n >= 2")
    if n <= 64:
        s = math.fsum(j * math.log(j) for j in range(2, n + 1))
        return 0.5 * (1.0 + math.log(n - 1)) - s / (n * (n - 1))
    r = np.arange(1, n) / (n - 1)
    s = math.fsum(r * np.log(r))
    return 0.5 - math.log(n) / (n - 1) - s / n


def delta_n_sequence(n_max):
    """delta_n(n) for n = 2..n_max as an array (index 0 is n = 2)."""
    n_max = int(n_max)
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    j = np.arange(1, n_max + 1, dtype=float)
    s = np.cumsum(j * np.log(j))[1:]
    n = np.arange(2, n_max + 1, dtype=float)
    return 0.5 * (1.0 + np.log(n - 1)) - s / (n * (n - 1))


# -- interpolation curve ---------------------------------------------------


def interpolation_f(ref_minimizer, target, Q, I_Q, t_grid):
    """f(t) = -rho t^2 W2^2 + E^Q(nu_t) - I^Q along the displacement interpolation.

    nu_t has quantile (1 - t) F_ref^{-1} + t F_target^{-1}. Returns an array
    aligned with ``t_grid``; also the quadrature error estimates as a second
    array.
    """
    from .measures import w2_result

    if ref_minimizer.atomic or target.atomic:
        raise DomainError("the interpolation curve needs non-atomic measures")
    t_grid = np.asarray(t_grid, dtype=float)
    breaks = np.union1d(ref_minimizer.breakpoints, target.breakpoints)
    singular = np.union1d(ref_minimizer.singular_breakpoints, target.singular_breakpoints)
    rules = quadrature.rules(breaks, singular)
    samples = [
        (quadrature.QuantileSample.of(ref_minimizer._quantile, r), quadrature.QuantileSample.of(target._quantile, r))
        for r in rules
    ]
    w2 = w2_result(ref_minimizer, target)
    out, errs = [], []
    for t in t_grid:
        vals = []
        for rule, (sr, st) in zip(rules, samples):
            pot, inter = _line_terms(rule, sr.combine(st, t), Q, LOG)
            vals.append(pot + inter)
        out.append(-Q.rho * t * t * w2.squared + vals[-1] - I_Q)
        errs.append(abs(vals[-1] - vals[0]) + Q.rho * t * t * w2.error_squared)
    return np.array(out), np.array(errs)
