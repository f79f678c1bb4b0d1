"""Numerical checks of the log-gas transportation-cost inequalities.

Each checker returns an :class:`InequalityReport` with both sides, the
slack rhs - lhs and the tolerance it is judged against: the sum of the
reported quadrature error bounds plus a fixed floor of 1e-8.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .circle import CircularMeasure, haar, w2_circle_result
from .energy import Potential, continuous_energy, discrete_energy
from .errors import DomainError
from .measures import Empirical, Semicircle, w2_result

__all__ = [
    "InequalityReport",
    "TOLERANCE_FLOOR",
    "check_line",
    "check_semicircular",
    "check_discrete",
    "check_measure_vs_fekete",
    "check_circle",
    "check_haar",
]

TOLERANCE_FLOOR = 1e-8
# Energies are computed without raising on loose error estimates; the estimate
# goes into the tolerance instead.
_ENERGY_TOL = None


@dataclass
class InequalityReport:
    """lhs <= rhs, judged with an explicit tolerance."""

    name: str
    lhs: float
    rhs: float
    tolerance: float
    inputs: dict = field(default_factory=dict)

    @property
    def slack(self):
        if math.isinf(self.rhs) and self.rhs > 0:
            return math.inf
        return self.rhs - self.lhs

    @property
    def ok(self):
        return self.slack >= -self.tolerance

    def to_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack,
                "tolerance": self.tolerance, "ok": self.ok, "inputs": self.inputs}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, default=repr)


def _describe(m):
    return repr(m)


def check_line(mu, Q, minimizer, I_Q, name="line"):
    """rho W2(mu, mu_Q)^2 <= E^Q(mu) - I^Q on the real line."""
    energy = continuous_energy(mu, Q, tol=_ENERGY_TOL)
    inputs = {"measure": _describe(mu), "potential": Q.label, "rho": Q.rho, "I_Q": I_Q}
    if not math.isfinite(energy.total):
        return InequalityReport(name, math.nan, math.inf, TOLERANCE_FLOOR, inputs)
    w = w2_result(mu, minimizer)
    lhs = Q.rho * w.squared
    tol = energy.quadrature_error + Q.rho * w.error_squared + TOLERANCE_FLOOR
    return InequalityReport(name, lhs, energy.total - I_Q, tol, inputs)


def check_semicircular(mu):
    """1/2 W2(mu, sigma)^2 <= 1/2 int x^2 dmu - double log integral - 3/4."""
    Q = Potential.quadratic(0.5)
    return check_line(mu, Q, Semicircle(), 0.75, name="semicircular")


def _points(x):
    pts = np.sort(np.asarray(getattr(x, "points", x), dtype=float).ravel())
    return pts


def check_discrete(x, fekete, Q):
    """rho W2(mu(x), mu(y))^2 <= E_n(x) - E_n(y) for Fekete points y."""
    xs = _points(x)
    ys = _points(fekete.points)
    if xs.size != ys.size:
        raise DomainError("configuration and Fekete points differ in size")
    energy = discrete_energy(xs, Q)
    lhs = Q.rho * float(np.mean((xs - ys) ** 2))
    # The Fekete solve is a minimization to gradient tolerance; its energy is
    # accurate to O(gradient^2), far below the floor. Round-off is scaled in.
    roundoff = 64 * np.finfo(float).eps * (abs(energy.potential) + abs(energy.interaction) + abs(fekete.energy))
    tol = TOLERANCE_FLOOR + roundoff
    inputs = {"n": int(xs.size), "potential": Q.label, "rho": Q.rho}
    return InequalityReport("discrete", lhs, energy.total - fekete.energy, tol, inputs)


def check_measure_vs_fekete(nu, fekete, Q):
    """rho W2(nu, mu(y))^2 <= E^Q(nu) - Delta_n for Fekete points y."""
    energy = continuous_energy(nu, Q, tol=_ENERGY_TOL)
    inputs = {"measure": _describe(nu), "n": fekete.n, "potential": Q.label, "rho": Q.rho}
    if not math.isfinite(energy.total):
        return InequalityReport("measure-vs-fekete", math.nan, math.inf, TOLERANCE_FLOOR, inputs)
    w = w2_result(nu, Empirical(fekete.points.points))
    lhs = Q.rho * w.squared
    tol = energy.quadrature_error + Q.rho * w.error_squared + TOLERANCE_FLOOR
    return InequalityReport("measure-vs-fekete", lhs, energy.total - fekete.energy, tol, inputs)


def check_circle(nu, Q, minimizer, I_Q, rho, name="circle"):
    """(rho + 1/4) W2(nu, nu_Q)^2 <= E^Q(nu) - I^Q on the unit circle.

    W2 is the mean-aligned lift distance.
    """
    if not rho > -0.25:
        raise DomainError("the circle inequality needs rho > -1/4")
    if not isinstance(nu, CircularMeasure):
        raise DomainError("check_circle expects a CircularMeasure")
    energy = continuous_energy(nu, Q, tol=_ENERGY_TOL)
    inputs = {"measure": _describe(nu), "potential": Q.label, "rho": rho, "I_Q": I_Q}
    if not math.isfinite(energy.total):
        return InequalityReport(name, math.nan, math.inf, TOLERANCE_FLOOR, inputs)
    w, cut = w2_circle_result(nu, minimizer)
    inputs["cut"] = cut
    lhs = (rho + 0.25) * w.squared
    tol = energy.quadrature_error + (rho + 0.25) * w.error_squared + TOLERANCE_FLOOR
    return InequalityReport(name, lhs, energy.total - I_Q, tol, inputs)


def check_haar(nu):
    """1/4 W2(nu, Haar)^2 <= -double integral of log|x - y| on the circle."""
    return check_circle(nu, Potential.zero(), haar(), 0.0, 0.0, name="haar")
