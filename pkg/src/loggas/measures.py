"""Probability measures on the line and quadratic Wasserstein distances.

Every measure exposes its quantile function; W2 between two measures on
the line is the L2 distance between quantile functions. Atomic measures
are compared exactly through merged cumulative-weight breakpoints, and all
other pairs by graded Gauss-Legendre quadrature in quantile space.
"""

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import quadrature
from .errors import DomainError
from .specfn import semicircle_cdf, semicircle_quantile

__all__ = [
    "Measure1D",
    "Empirical",
    "Dirac",
    "Uniform",
    "Semicircle",
    "Gridded",
    "Interpolant",
    "MonotoneMap",
    "W2Result",
    "quantile",
    "w2",
    "w2_result",
    "monotone_transport",
    "displacement_interpolate",
    "load_empirical",
    "save_empirical",
    "load_gridded",
]


def _check_levels(t):
    t = np.asarray(t, dtype=float)
    if np.any(~((t > 0) & (t < 1))):
        raise DomainError("quantile levels must lie in (0, 1)")
    return t


def _out(arr):
    arr = np.asarray(arr)
    return float(arr) if arr.ndim == 0 else arr


class Measure1D:
    """Base class. Subclasses implement ``_quantile`` and ``_cdf``."""

    kind = "abstract"
    atomic = False

    def quantile(self, t):
        """Generalised inverse F^{-1}(t) = inf{x : F(x) >= t} for t in (0, 1)."""
        return _out(self._quantile(_check_levels(t)))

    def cdf(self, x):
        return _out(self._cdf(np.asarray(x, dtype=float)))

    @property
    def breakpoints(self):
        """Quantile levels in (0, 1) where the quantile function is not smooth."""
        return np.empty(0)

    @property
    def singular_breakpoints(self):
        """Levels in [0, 1] where the quantile derivative blows up (or nearly so).

        Quadrature panels are graded towards these levels; 0 and 1 stand for
        the ends of the support. The default grades both ends.
        """
        return np.array([0.0, 1.0])

    @property
    def support(self):
        raise NotImplementedError

    @cached_property
    def mean(self):
        return self._moment(1)

    @cached_property
    def second_moment(self):
        return self._moment(2)

    def _moment(self, k):
        vals = []
        for rule in quadrature.rules(self.breakpoints, self.singular_breakpoints):
            vals.append(quadrature.integrate(lambda u: self._quantile(u) ** k, rule))
        return vals[-1]

    def shift(self, c):
        """The measure translated by c."""
        return Interpolant(self, self, 0.0, offset=c)

    def _cdf(self, x):
        raise NotImplementedError

    def _quantile(self, t):
        raise NotImplementedError


class Empirical(Measure1D):
    """Finitely many atoms with positive weights (uniform if none given).

    Atoms are sorted and exact duplicates merged, so atoms stay strictly
    increasing.
    """

    atomic = True

    def __init__(self, atoms, weights=None):
        atoms = np.asarray(atoms, dtype=float).ravel()
        if atoms.size == 0 or not np.all(np.isfinite(atoms)):
            raise ValueError("need at least one finite atom")
        if weights is None:
            weights = np.full(atoms.size, 1.0 / atoms.size)
            uniform = True
        else:
            weights = np.asarray(weights, dtype=float).ravel()
            if weights.shape != atoms.shape or np.any(~(weights > 0)):
                raise ValueError("weights must be positive, one per atom")
            if abs(weights.sum() - 1.0) > 1e-12:
                raise ValueError("weights must sum to 1")
            uniform = bool(np.all(weights == weights[0]))
        order = np.argsort(atoms, kind="stable")
        atoms, weights = atoms[order], weights[order]
        uniq, inverse = np.unique(atoms, return_inverse=True)
        if uniq.size < atoms.size:
            weights = np.bincount(inverse, weights=weights)
            atoms = uniq
            uniform = False
        self.atoms = atoms
        self.weights = weights / weights.sum()
        self.equal_weights = uniform
        cum = np.cumsum(self.weights)
        cum[-1] = 1.0
        self.cumulative = cum
        self.atoms.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def kind(self):
        return "empirical" if self.equal_weights else "weighted-empirical"

    @property
    def n(self):
        return self.atoms.size

    @property
    def support(self):
        return float(self.atoms[0]), float(self.atoms[-1])

    @property
    def breakpoints(self):
        return self.cumulative[:-1]

    @cached_property
    def mean(self):
        return float(np.dot(self.weights, self.atoms))

    @cached_property
    def second_moment(self):
        return float(np.dot(self.weights, self.atoms ** 2))

    def _quantile(self, t):
        idx = np.searchsorted(self.cumulative, t, side="left")
        return self.atoms[np.minimum(idx, self.atoms.size - 1)]

    def _cdf(self, x):
        idx = np.searchsorted(self.atoms, x, side="right")
        cum = np.concatenate([[0.0], self.cumulative])
        return cum[idx]

    def shift(self, c):
        return Empirical(self.atoms + c, None if self.equal_weights else self.weights)

    def __repr__(self):
        return f"Empirical(n={self.n}, kind={self.kind!r})"


class Dirac(Empirical):
    """Point mass at c."""

    def __init__(self, c):
        super().__init__([c])
        self.c = float(c)

    @property
    def kind(self):
        return "dirac"

    def shift(self, c):
        return Dirac(self.c + c)

    def __repr__(self):
        return f"Dirac({self.c!r})"


class Uniform(Measure1D):
    kind = "uniform"

    def __init__(self, a, b):
        a, b = float(a), float(b)
        if not b > a:
            raise ValueError("uniform(a, b) requires a < b")
        self.a, self.b = a, b

    @property
    def support(self):
        return self.a, self.b

    @cached_property
    def mean(self):
        return 0.5 * (self.a + self.b)

    @cached_property
    def second_moment(self):
        a, b = self.a, self.b
        return (a * a + a * b + b * b) / 3.0

    @property
    def singular_breakpoints(self):
        return np.empty(0)

    def _quantile(self, t):
        # Interpolate from the nearer end to keep relative accuracy at u ~ 1.
        return np.where(t <= 0.5, self.a + (self.b - self.a) * t, self.b - (self.b - self.a) * (1.0 - t))

    def _cdf(self, x):
        return np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)

    def shift(self, c):
        return Uniform(self.a + c, self.b + c)

    def __repr__(self):
        return f"Uniform({self.a!r}, {self.b!r})"


class Semicircle(Measure1D):
    """Semicircle law centred at ``center`` with support radius ``radius``."""

    kind = "semicircle"

    def __init__(self, center=0.0, radius=2.0):
        self.center = float(center)
        self.radius = float(radius)
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def support(self):
        return self.center - self.radius, self.center + self.radius

    @property
    def singular_breakpoints(self):
        return np.array([0.0, 1.0])

    @cached_property
    def mean(self):
        return self.center

    @cached_property
    def second_moment(self):
        return self.center ** 2 + self.radius ** 2 / 4.0

    def _quantile(self, t):
        return self.center + 0.5 * self.radius * semicircle_quantile(t)

    def _cdf(self, x):
        return semicircle_cdf(2.0 * (x - self.center) / self.radius)

    def density(self, x):
        y = 2.0 * (np.asarray(x, dtype=float) - self.center) / self.radius
        inside = np.abs(y) < 2
        out = np.zeros_like(y)
        out[inside] = np.sqrt(4.0 - y[inside] ** 2) / (math.pi * self.radius)
        return _out(out)

    def shift(self, c):
        return Semicircle(self.center + c, self.radius)

    def __repr__(self):
        return f"Semicircle(center={self.center!r}, radius={self.radius!r})"


class Gridded(Measure1D):
    """Piecewise-linear density sampled on a uniform grid over [a, b].

    The trapezoid integral of the samples must be 1 within 1e-8; use
    :meth:`normalized` to rescale raw samples.
    """

    kind = "gridded"

    def __init__(self, density, a, b):
        f = np.asarray(density, dtype=float).ravel()
        a, b = float(a), float(b)
        if f.size < 2 or not b > a:
            raise ValueError("need at least two samples on a nondegenerate interval")
        if np.any(f < 0) or not np.all(np.isfinite(f)):
            raise ValueError("density samples must be finite and nonnegative")
        h = (b - a) / (f.size - 1)
        cell_mass = 0.5 * h * (f[:-1] + f[1:])
        total = cell_mass.sum()
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"density integrates to {total!r}, not 1")
        self.density_values = f / total
        self.a, self.b, self.h = a, b, h
        cell_mass = cell_mass / total
        self._cum = np.concatenate([[0.0], np.cumsum(cell_mass)])
        self._cum[-1] = 1.0
        self.density_values.setflags(write=False)

    @classmethod
    def normalized(cls, density, a, b):
        f = np.asarray(density, dtype=float)
        h = (float(b) - float(a)) / (f.size - 1)
        return cls(f / (0.5 * h * (f[:-1] + f[1:])).sum(), a, b)

    @classmethod
    def from_function(cls, func, a, b, cells=200):
        x = np.linspace(a, b, cells + 1)
        return cls.normalized(func(x), a, b)

    @property
    def grid(self):
        return np.linspace(self.a, self.b, self.density_values.size)

    @property
    def support(self):
        return self.a, self.b

    @property
    def breakpoints(self):
        return self._cum[1:-1]

    @property
    def singular_breakpoints(self):
        # Within a cell the quantile has a square-root branch point at level
        # distance f_k^2 h / (2 |f_{k+1} - f_k|) beyond the knot; knots where
        # that distance is small against the cell mass need graded panels.
        f, h = self.density_values, self.h
        mass = np.diff(self._cum)
        jump = np.abs(np.diff(f))
        with np.errstate(divide="ignore"):
            reach_right = np.where(jump > 0, f[:-1] ** 2 * h / (2 * jump), np.inf)
            reach_left = np.where(jump > 0, f[1:] ** 2 * h / (2 * jump), np.inf)
        near = np.zeros(f.size, dtype=bool)
        near[:-1] |= reach_right < 0.25 * mass
        near[1:] |= reach_left < 0.25 * mass
        return self._cum[near]

    def density(self, x):
        return _out(np.interp(np.asarray(x, dtype=float), self.grid, self.density_values, left=0.0, right=0.0))

    def _quantile(self, t):
        cum, f, h = self._cum, self.density_values, self.h
        k = np.clip(np.searchsorted(cum, t, side="left") - 1, 0, f.size - 2)
        r = t - cum[k]
        fa, fb = f[k], f[k + 1]
        A = (fb - fa) / (2.0 * h)
        disc = np.sqrt(np.maximum(fa * fa + 4.0 * A * r, 0.0))
        denom = fa + disc
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(denom > 0, 2.0 * r / denom, 0.0)
        return self.a + k * h + np.clip(s, 0.0, h)

    def _cdf(self, x):
        f, h = self.density_values, self.h
        y = np.clip((x - self.a) / h, 0.0, f.size - 1)
        k = np.clip(np.floor(y).astype(int), 0, f.size - 2)
        s = (y - k) * h
        fa, fb = f[k], f[k + 1]
        val = self._cum[k] + fa * s + (fb - fa) / (2.0 * h) * s * s
        return np.where(x <= self.a, 0.0, np.where(x >= self.b, 1.0, np.clip(val, 0.0, 1.0)))

    def __repr__(self):
        return f"Gridded(cells={self.density_values.size - 1}, a={self.a!r}, b={self.b!r})"


class Interpolant(Measure1D):
    """Law with quantile (1 - t) F^{-1} + t G^{-1} + offset.

    This is the displacement interpolation between ``ref`` and ``target``;
    with ``ref is target`` and t = 0 it is a translate of ``ref``.
    """

    kind = "interpolant"

    def __init__(self, ref, target, t, offset=0.0):
        self.ref, self.target, self.t = ref, target, float(t)
        self.offset = float(offset)
        self.atomic = ref.atomic or target.atomic

    @property
    def support(self):
        lo = (1 - self.t) * self.ref.support[0] + self.t * self.target.support[0]
        hi = (1 - self.t) * self.ref.support[1] + self.t * self.target.support[1]
        return lo + self.offset, hi + self.offset

    @property
    def breakpoints(self):
        return np.union1d(self.ref.breakpoints, self.target.breakpoints)

    @property
    def singular_breakpoints(self):
        return np.union1d(self.ref.singular_breakpoints, self.target.singular_breakpoints)

    @cached_property
    def mean(self):
        return (1 - self.t) * self.ref.mean + self.t * self.target.mean + self.offset

    def _quantile(self, t):
        q = self.ref._quantile(t)
        if self.t:
            q = (1 - self.t) * q + self.t * self.target._quantile(t)
        return q + self.offset

    def _cdf(self, x):
        # Bisection on the nondecreasing quantile.
        x = np.asarray(x, dtype=float)
        lo = np.zeros_like(x)
        hi = np.ones_like(x)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            inside = (mid > 0) & (mid < 1)
            qm = self._quantile(np.where(inside, mid, 0.5))
            below = qm <= x
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def shift(self, c):
        return Interpolant(self.ref, self.target, self.t, self.offset + c)

    def __repr__(self):
        return f"Interpolant({self.ref!r}, {self.target!r}, t={self.t!r}, offset={self.offset!r})"


def quantile(m, t):
    return m.quantile(t)


@dataclass(frozen=True)
class W2Result:
    """W2 distance with the quadrature error of its square."""

    squared: float
    error_squared: float
    method: str

    @property
    def value(self):
        return math.sqrt(max(self.squared, 0.0))

    @property
    def error(self):
        """Error bound on the distance itself."""
        if self.error_squared == 0:
            return 0.0
        return math.sqrt(max(self.squared, 0.0) + self.error_squared) - self.value

    def to_dict(self):
        return {"w2": self.value, "method": self.method, "quadrature_error": self.error}


def _merged_atomic_w2sq(mu, nu):
    levels = np.union1d(mu.cumulative, nu.cumulative)
    levels = levels[levels > 0]
    levels[-1] = 1.0
    lower = np.concatenate([[0.0], levels[:-1]])
    widths = levels - lower
    keep = widths > 0
    mid = (0.5 * (lower + levels))[keep]
    diff = mu._quantile(mid) - nu._quantile(mid)
    return float(np.dot(widths[keep], diff * diff))


def _require_finite_moment(m):
    lo, hi = m.support
    if np.isfinite(lo) and np.isfinite(hi):
        return
    if not np.isfinite(m.second_moment):
        raise DomainError(f"{m!r} has no finite second moment")


def w2_result(mu, nu):
    """W2(mu, nu) with method and error estimate."""
    _require_finite_moment(mu)
    _require_finite_moment(nu)
    if mu is nu:
        return W2Result(0.0, 0.0, "identical")
    if isinstance(mu, Empirical) and isinstance(nu, Empirical):
        if mu.equal_weights and nu.equal_weights and mu.n == nu.n:
            d = mu.atoms - nu.atoms
            return W2Result(float(np.mean(d * d)), 0.0, "sorted-pairing")
        return W2Result(_merged_atomic_w2sq(mu, nu), 0.0, "merged-breakpoints")
    breaks = np.union1d(mu.breakpoints, nu.breakpoints)
    singular = np.union1d(mu.singular_breakpoints, nu.singular_breakpoints)
    vals = [
        quadrature.integrate(lambda u: (mu._quantile(u) - nu._quantile(u)) ** 2, rule)
        for rule in quadrature.rules(breaks, singular)
    ]
    return W2Result(vals[-1], abs(vals[-1] - vals[0]), "quantile-quadrature")


def w2(mu, nu):
    """Quadratic Wasserstein distance between two measures on the line."""
    return w2_result(mu, nu).value


class MonotoneMap:
    """Monotone transport x -> G^{-1}(F(x)) from ``source`` to ``target``."""

    def __init__(self, source, target):
        self.source, self.target = source, target

    def __call__(self, x):
        u = np.asarray(self.source.cdf(x), dtype=float)
        u = np.clip(u, 1e-300, np.nextafter(1.0, 0.0))
        return self.target.quantile(u)

    def is_monotone(self, points=1000):
        lo, hi = self.source.support
        x = np.linspace(lo, hi, points)
        y = np.atleast_1d(self(x))
        return bool(np.all(np.diff(y) >= -1e-12 * max(1.0, np.max(np.abs(y)))))

    def pushforward_error(self, points=999):
        """max |theta(F^{-1}(u)) - G^{-1}(u)| on a grid of levels."""
        u = np.arange(1, points + 1) / (points + 1)
        return float(np.max(np.abs(self(self.source.quantile(u)) - self.target.quantile(u))))

    def cost(self):
        """integral of |theta(x) - x|^2 against the source measure."""
        src = self.source
        vals = []
        for rule in quadrature.rules(src.breakpoints, src.singular_breakpoints):
            vals.append(quadrature.integrate(lambda u: (self(src._quantile(u)) - src._quantile(u)) ** 2, rule))
        return vals[-1]


def monotone_transport(source, target):
    return MonotoneMap(source, target)


def displacement_interpolate(ref, target, t):
    """Law of t theta(x) + (1 - t) x under ``ref``, theta the monotone map."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    if t == 0.0:
        return ref
    if t == 1.0:
        return target
    if isinstance(ref, Empirical) and isinstance(target, Empirical):
        if ref.equal_weights and target.equal_weights and ref.n == target.n:
            return Empirical((1 - t) * ref.atoms + t * target.atoms)
        levels = np.union1d(ref.cumulative, target.cumulative)
        levels = levels[levels > 0]
        levels[-1] = 1.0
        lower = np.concatenate([[0.0], levels[:-1]])
        keep = levels - lower > 0
        mid = (0.5 * (lower + levels))[keep]
        atoms = (1 - t) * ref._quantile(mid) + t * target._quantile(mid)
        widths = (levels - lower)[keep]
        return Empirical(atoms, widths / widths.sum())
    return Interpolant(ref, target, t)


def load_empirical(path):
    """Read atoms (and optional weights) from a CSV file; a header row is skipped."""
    atoms, weights = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip():
                continue
            try:
                vals = [float(v) for v in row]
            except ValueError:
                if atoms:
                    raise
                continue
            atoms.append(vals[0])
            if len(vals) > 1:
                weights.append(vals[1])
    if weights and len(weights) != len(atoms):
        raise ValueError("weights column is incomplete")
    if weights:
        w = np.asarray(weights)
        return Empirical(atoms, w / w.sum())
    return Empirical(atoms)


def save_empirical(m, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if m.equal_weights:
            writer.writerow(["atom"])
            for a in m.atoms:
                writer.writerow([format(a, ".17g")])
        else:
            writer.writerow(["atom", "weight"])
            for a, w in zip(m.atoms, m.weights):
                writer.writerow([format(a, ".17g"), format(w, ".17g")])


def load_gridded(path):
    """Read ``x,density`` rows on a uniform grid and normalise."""
    xs, fs = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if len(row) < 2:
                continue
            try:
                x, f = float(row[0]), float(row[1])
            except ValueError:
                if xs:
                    raise
                continue
            xs.append(x)
            fs.append(f)
    xs = np.asarray(xs)
    if xs.size < 2 or not np.allclose(np.diff(xs), xs[1] - xs[0], rtol=1e-9, atol=1e-12):
        raise ValueError("gridded density needs a uniform grid of at least two points")
    return Gridded.normalized(fs, xs[0], xs[-1])
