"""Fekete points: minimizers of the discrete log-gas energy.

The discrete energy is strictly convex on ordered configurations when Q is
convex, so a damped Newton iteration with the exact Hessian converges
quadratically once close, and step halving keeps every iterate ordered.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .energy import Potential, delta_n, discrete_energy
from .errors import CoincidenceError, ConvergenceError, DomainError
from .measures import Measure1D

__all__ = [
    "Configuration",
    "FeketeResult",
    "MonotonicityReport",
    "energy_gradient",
    "energy_hessian",
    "fekete_points",
    "delta_monotonicity_check",
]

MIN_GAP = 1e-14


class Configuration:
    """Strictly increasing n-point configuration, n >= 2."""

    def __init__(self, points):
        pts = np.array(points, dtype=float).ravel()
        if pts.size < 2:
            raise DomainError("a configuration needs n >= 2 points")
        if not np.all(np.isfinite(pts)):
            raise DomainError("configuration points must be finite")
        if not np.all(np.diff(pts) > 0):
            raise DomainError("configuration points must be strictly increasing")
        pts.flags.writeable = False
        self.points = pts

    @classmethod
    def from_unsorted(cls, points):
        pts = np.sort(np.asarray(points, dtype=float).ravel())
        if np.any(np.diff(pts) == 0):
            raise CoincidenceError("configuration has coinciding points")
        return cls(pts)

    @property
    def n(self):
        return self.points.size

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Configuration(n={self.n})"


def _pairs(x):
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, np.inf)
    if np.any(d == 0):
        raise CoincidenceError("configuration has coinciding points")
    return d


def energy_gradient(x, Q):
    """Gradient of the discrete energy: Q'(x_i)/n - 2/(n(n-1)) sum_j 1/(x_i - x_j)."""
    x = np.asarray(getattr(x, "points", x), dtype=float)
    n = x.size
    inv = 1.0 / _pairs(x)
    return Q.derivative(x) / n - 2.0 / (n * (n - 1)) * inv.sum(axis=1)


def energy_hessian(x, Q):
    """Exact Hessian; positive definite on distinct points when Q'' > 0."""
    x = np.asarray(getattr(x, "points", x), dtype=float)
    n = x.size
    c = 2.0 / (n * (n - 1))
    inv2 = _pairs(x) ** -2.0
    H = -c * inv2
    np.fill_diagonal(H, c * inv2.sum(axis=1) + Q.second_derivative(x) / n)
    return H


@dataclass
class FeketeResult:
    """Outcome of a Fekete solve."""

    points: Configuration
    energy: float
    gradient_norm: float
    iterations: int
    initial_energy: float
    potential: str = ""
    converged: bool = True

    @property
    def n(self):
        return self.points.n

    def to_dict(self):
        out = {
            "n": self.n,
            "potential": self.potential,
            "energy": self.energy,
            "gradient_norm": self.gradient_norm,
            "iterations": self.iterations,
            "initial_energy": self.initial_energy,
            "converged": self.converged,
        }
        if self.potential.startswith("quadratic:0.5"):
            out["delta_n_closed_form"] = delta_n(self.n)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["i", "x"])
            for i, v in enumerate(self.points.points, 1):
                writer.writerow([i, format(float(v), ".17g")])


def _initial(n, Q):
    m = Q.minimizer
    if isinstance(m, Measure1D):
        return m.quantile((np.arange(1, n + 1) - 0.5) / n)
    return np.linspace(-1.0, 1.0, n)


def _energy(x, Q):
    return discrete_energy(x, Q).total


def fekete_points(n, Q=None, tol=1e-10, init=None, max_iter=200):
    """Minimize the discrete energy by damped Newton iteration.

    Parameters
    ----------
    n : int
        Number of points, at least 2.
    Q : Potential, optional
        Defaults to x^2/2.
    tol : float
        Target for the max-norm of the gradient.
    init : Configuration or array, optional
        Starting configuration; defaults to equilibrium quantiles at
        (i - 1/2)/n when the equilibrium measure is known, else equispaced
        points on [-1, 1].

    Raises
    ------
    ConvergenceError
        After ``max_iter`` iterations; the best iterate is on ``.result``.
    """
    n = int(n)
    if n < 2:
        raise DomainError("Fekete points need n >= 2")
    Q = Potential.quadratic(0.5) if Q is None else Q
    x = np.array(getattr(init, "points", init) if init is not None else _initial(n, Q), dtype=float)
    if x.size != n:
        raise DomainError("initial configuration has the wrong size")
    x = np.sort(x)
    if np.any(np.diff(x) <= MIN_GAP):
        raise CoincidenceError("initial configuration has coinciding points")
    e0 = e = _energy(x, Q)
    g = energy_gradient(x, Q)
    gnorm = float(np.max(np.abs(g)))
    it = 0
    while gnorm > tol and it < max_iter:
        it += 1
        H = energy_hessian(x, Q)
        try:
            step = -np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = -g
        slope = float(np.dot(g, step))
        if slope >= 0:
            # Hessian not positive definite here (non-convex Q); fall back to descent.
            step, slope = -g, -float(np.dot(g, g))
        t = 1.0
        accepted = False
        while t > 1e-12:
            trial = x + t * step
            if np.all(np.diff(trial) > MIN_GAP):
                e_new = _energy(trial, Q)
                g_new = energy_gradient(trial, Q)
                gn_new = float(np.max(np.abs(g_new)))
                armijo = e_new <= e + 1e-4 * t * slope
                # At round-off level energies stall; accept a gradient decrease.
                flat = abs(e_new - e) <= 8 * np.finfo(float).eps * max(1.0, abs(e)) and gn_new < gnorm
                if armijo or flat:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            break
        x, e, g, gnorm = trial, e_new, g_new, gn_new
    result = FeketeResult(Configuration(x), e, gnorm, it, e0, Q.label, gnorm <= tol)
    if not result.converged:
        raise ConvergenceError(f"Fekete solve stopped at gradient norm {gnorm:.3g}", result)
    return result


@dataclass
class MonotonicityReport:
    """Minimized energies for n = 2..n_max and whether they are nondecreasing."""

    n_values: list
    energies: list
    tolerance: float
    ok: bool = field(init=False)

    def __post_init__(self):
        e = self.energies
        self.ok = all(b >= a - self.tolerance for a, b in zip(e, e[1:]))

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {"n": list(self.n_values), "energy": list(self.energies), "tolerance": self.tolerance, "ok": self.ok}


def delta_monotonicity_check(n_max, Q=None, tol=1e-10):
    """Solve for n = 2..n_max and test that minimum energies never decrease."""
    n_max = int(n_max)
    if n_max < 3:
        raise DomainError("n_max must be >= 3")
    Q = Potential.quadratic(0.5) if Q is None else Q
    ns = list(range(2, n_max + 1))
    energies = [fekete_points(n, Q, tol).energy for n in ns]
    return MonotonicityReport(ns, energies, tolerance=max(tol, 1e-12))
